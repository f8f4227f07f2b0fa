//! Spectra of prescribed Beurling dimension `t`: `Λ_t = F_t ∪ Λ_t'`, where
//! `F_t` keeps the canonical points whose words use only the active
//! positions of a density pattern and `Λ_t'` pushes every other point onto a
//! lacunary tail through kicks at offset `m_k = k²`.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::adic::AdicPoint;
use crate::error::{Error, Result};
use crate::lattice::{Digit, MatrixParams};
use crate::pattern::PatternSpec;
use crate::treemap::{
    enumerate_spectrum, index_to_word, lambda_of_index, variant_bit, Bound, KickMode, OffsetRule,
    SpectrumPoint, SpectrumPrefix, TreeMappingSpec,
};

const SNAP: f64 = 1e-9;

/// Largest admissible target dimension, `log 3 / log 3q2`.
pub fn max_dimension(p: &MatrixParams) -> f64 {
    3f64.ln() / (p.radix_y() as f64).ln()
}

/// Pattern density `d = t · log 3q2 / log 3`.
pub fn density_for(t: f64, p: &MatrixParams) -> Result<f64> {
    let max = max_dimension(p);
    if !t.is_finite() {
        return Err(Error::DimensionOutOfRange { t, max });
    }
    let d = t / max;
    if !(-SNAP..=1.0 + SNAP).contains(&d) {
        return Err(Error::DimensionOutOfRange { t, max });
    }
    Ok(d.clamp(0.0, 1.0))
}

/// The Beatty pattern of density `t · log 3q2 / log 3`; `Γ_t` is the set of
/// indices admitted by it.
pub fn gamma_t_from_density(t: f64, p: &MatrixParams) -> Result<PatternSpec> {
    PatternSpec::beatty(density_for(t, p)?)
}

/// Whether index `k` lies in `Γ_t` for `pattern`.
pub fn in_gamma_t(pattern: &PatternSpec, k: i64) -> bool {
    pattern.admits(index_to_word(k).letters())
}

/// Every position except the perfect squares `≥ 4`; frequency 1.
///
/// Used in place of the full pattern when variants must differ at the top
/// dimension, where the full pattern leaves nothing to kick.
pub fn dense_pattern_with_gaps() -> PatternSpec {
    let pred = Arc::new(|i: u64| {
        let r = (i as f64).sqrt().round() as u64;
        !(i >= 4 && r * r == i)
    });
    PatternSpec::Explicit {
        name: "non-squares".into(),
        frequency: 1.0,
        predicate: pred,
    }
}

#[derive(Debug, Clone)]
pub struct IntermediateSpec {
    pub t: f64,
    pub params: MatrixParams,
    pub pattern: PatternSpec,
    pub kick: Digit,
    /// `None` gives `m_k = k²`; a seed adds a variant bit to each kicked index.
    pub variant_seed: Option<u64>,
    pub mode: KickMode,
}

impl IntermediateSpec {
    /// Target `t` with the Beatty pattern; `kick = None` uses the default kick.
    pub fn new(t: f64, p: &MatrixParams, kick: Option<Digit>, mode: KickMode) -> Result<Self> {
        let pattern = gamma_t_from_density(t, p)?;
        let kick = match kick {
            Some(k) => k,
            None => crate::treemap::default_kick(p).map_err(|e| match e {
                Error::InadmissibleKick { kick, reason } => Error::InadmissibleKick {
                    kick,
                    reason: format!("{reason}; pass an explicit kick in E_q1 \\ {{0}}"),
                },
                e => e,
            })?,
        };
        crate::treemap::check_kick(kick, p)?;
        Ok(Self {
            t,
            params: *p,
            pattern,
            kick,
            variant_seed: None,
            mode,
        })
    }

    pub fn offsets(&self) -> OffsetRule {
        OffsetRule::Squares {
            exempt: Some(self.pattern.clone()),
            variant_seed: self.variant_seed,
        }
    }

    pub fn to_tree_spec(&self) -> Result<TreeMappingSpec> {
        TreeMappingSpec::kicked(&self.params, self.offsets(), Some(self.kick), self.mode)
    }

    pub fn in_gamma_t(&self, k: i64) -> bool {
        in_gamma_t(&self.pattern, k)
    }
}

/// Which part of `Λ_t` a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Part {
    /// `k ∈ Γ_t`.
    Dense,
    /// `k ∉ Γ_t`, carrying a kick.
    Lacunary,
}

#[derive(Debug, Clone)]
pub struct IntermediateSpectrum {
    pub spec: IntermediateSpec,
    pub tree_spec: TreeMappingSpec,
    pub prefix: SpectrumPrefix,
    /// Parallel to `prefix.points`.
    pub parts: Vec<Part>,
    /// Dense points that differ from the canonical point with the same index.
    pub dense_perturbed: usize,
}

impl IntermediateSpectrum {
    fn select(&self, part: Part) -> Vec<SpectrumPoint> {
        self.prefix
            .points
            .iter()
            .zip(&self.parts)
            .filter(|(_, &q)| q == part)
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// The `F_t` part of the prefix.
    pub fn dense(&self) -> Vec<SpectrumPoint> {
        self.select(Part::Dense)
    }

    /// The `Λ_t'` part of the prefix.
    pub fn lacunary(&self) -> Vec<SpectrumPoint> {
        self.select(Part::Lacunary)
    }
}

/// Builds `Λ_t` on `bound` and tags its two parts.
pub fn build_intermediate_spectrum(spec: &IntermediateSpec, bound: Bound) -> Result<IntermediateSpectrum> {
    let tree_spec = spec.to_tree_spec()?;
    let prefix = enumerate_spectrum(&tree_spec, &spec.params, bound)?;
    let parts: Vec<Part> = prefix
        .points
        .iter()
        .map(|s| {
            if spec.in_gamma_t(s.k) {
                Part::Dense
            } else {
                Part::Lacunary
            }
        })
        .collect();
    let mut dense_perturbed = 0;
    for (s, part) in prefix.points.iter().zip(&parts) {
        if *part == Part::Dense {
            let canon = lambda_of_index(&TreeMappingSpec::Canonical, &spec.params, s.k)?;
            if canon.point != s.point {
                dense_perturbed += 1;
            }
        }
    }
    Ok(IntermediateSpectrum {
        spec: spec.clone(),
        tree_spec,
        prefix,
        parts,
        dense_perturbed,
    })
}

/// `F_t` through word length `depth`, generated directly from the pattern.
pub fn dense_part(spec: &IntermediateSpec, depth: u32) -> Result<Vec<AdicPoint>> {
    crate::dimension::pattern_set(&spec.params, &spec.pattern, depth)
}

/// Index range over which variants are compared.
pub const VARIANT_CHECK_RANGE: i64 = 364;

fn offset_signature(spec: &IntermediateSpec) -> Result<Vec<u64>> {
    let rule = spec.offsets();
    (1..=VARIANT_CHECK_RANGE)
        .flat_map(|k| [k, -k])
        .filter(|&k| !spec.in_gamma_t(k))
        .map(|k| rule.offset(k))
        .collect()
}

/// `count` variants of the construction at `t` with pairwise-distinct
/// offsets on `|k| ≤ 364`. Variant 0 has all variant bits 0.
///
/// At the top dimension every index is in `Γ_t`, so for `count > 1` the
/// variants use [`dense_pattern_with_gaps`] instead, which keeps the density.
pub fn family_variants(
    base: &IntermediateSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<IntermediateSpec>> {
    if count > 1 << 16 {
        return Err(Error::InvalidArgument(format!("at most 65536 variants, asked for {count}")));
    }
    let mut base = base.clone();
    base.variant_seed = None;
    if count > 1 && !(1..=VARIANT_CHECK_RANGE).any(|k| !base.in_gamma_t(k) || !base.in_gamma_t(-k)) {
        base.pattern = dense_pattern_with_gaps();
    }
    let mut out = Vec::with_capacity(count);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    if count == 0 {
        return Ok(out);
    }
    seen.insert(offset_signature(&base)?);
    out.push(base.clone());
    let mut draw = seed;
    while out.len() < count {
        let mut v = base.clone();
        v.variant_seed = Some(draw);
        draw = draw.wrapping_add(0x9E37_79B9_7F4A_7C15);
        if seen.insert(offset_signature(&v)?) {
            out.push(v);
        }
        if draw == seed {
            return Err(Error::InvalidArgument("variant seeds exhausted".into()));
        }
    }
    Ok(out)
}

/// Variant bit used for `k` by `spec` (0 when unseeded or `k ∈ Γ_t`).
pub fn variant_bit_of(spec: &IntermediateSpec, k: i64) -> u64 {
    match spec.variant_seed {
        Some(s) if !spec.in_gamma_t(k) && k != 0 => variant_bit(s, k),
        _ => 0,
    }
}
