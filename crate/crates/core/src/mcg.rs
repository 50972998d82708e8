//! Mapping classes as free-group automorphisms, and congruence subgroups
//! given by the action on homology mod `m`.

use std::fmt;
use std::str::FromStr;

use crate::classes::{self, ArcClass, Class, CurveClass, MultiClass};
use crate::error::{Error, Result};
use crate::surface::RibbonSurface;
use crate::word::{self, Letter, Word};

/// How mapping classes may treat the boundary components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryConvention {
    /// Boundary components may be permuted.
    #[default]
    Setwise,
    /// Every boundary component is mapped to itself.
    Fixed,
}

impl FromStr for BoundaryConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "setwise" => Ok(Self::Setwise),
            "fixed" => Ok(Self::Fixed),
            _ => Err(Error::Config(format!("unknown boundary convention {s:?}"))),
        }
    }
}

impl fmt::Display for BoundaryConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Setwise => "setwise",
            Self::Fixed => "fixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MCGAutomorphism {
    label: String,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
    /// `φ(b_i) = c_i · b_{perm[i]} · c_i⁻¹`.
    boundary_perm: Vec<usize>,
    conjugators: Vec<Word>,
}

fn substitute_into(out: &mut Word, images: &[Word], w: &[Letter]) {
    for l in w {
        let img = &images[l.index()];
        if l.is_inverse() {
            img.iter().rev().for_each(|x| word::push_reduced(out, x.inv()));
        } else {
            img.iter().for_each(|&x| word::push_reduced(out, x));
        }
    }
}

fn substitute(images: &[Word], w: &[Letter]) -> Word {
    let mut out = Vec::with_capacity(w.len() * 2);
    substitute_into(&mut out, images, w);
    out
}

/// Finds `j` and `c` with `w = c · b_j · c⁻¹`.
fn match_boundary(surface: &RibbonSurface, w: &[Letter]) -> Option<(usize, Word)> {
    let (t, core) = word::cyclic_split(w);
    for (j, b) in surface.boundary_words().iter().enumerate() {
        if b.len() != core.len() {
            continue;
        }
        for k in 0..b.len() {
            if word::rotate(b, k) == core {
                // core = p⁻¹ b p with p = b[..k]
                let c = word::concat(&[&t, &word::inverse(&b[..k])]);
                return Some((j, word::reduce(c)));
            }
        }
    }
    None
}

impl MCGAutomorphism {
    pub fn identity(surface: &RibbonSurface) -> Self {
        let gens: Vec<Word> = (0..surface.rank()).map(|i| vec![Letter::gen(i)]).collect();
        Self::from_words(surface, "id", gens.clone(), gens).expect("identity validates")
    }

    /// Builds and validates an automorphism from generator images written in
    /// the surface alphabet.
    pub fn new(surface: &RibbonSurface, label: &str, images: &[&str], inverse_images: &[&str]) -> Result<Self> {
        let parse = |xs: &[&str]| -> Result<Vec<Word>> {
            xs.iter().map(|x| surface.parse_word(x).map(word::reduce)).collect()
        };
        Self::from_words(surface, label, parse(images)?, parse(inverse_images)?)
    }

    pub fn from_words(surface: &RibbonSurface, label: &str, images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Self> {
        let n = surface.rank();
        if images.len() != n || inverse_images.len() != n {
            return Err(Error::InvalidSurface(format!("{label}: expected {n} generator images")));
        }
        for i in 0..n {
            let g = vec![Letter::gen(i)];
            let there = substitute(&images, &substitute(&inverse_images, &g));
            let back = substitute(&inverse_images, &substitute(&images, &g));
            if there != g || back != g {
                return Err(Error::InvalidSurface(format!("{label}: inverse images do not invert")));
            }
        }
        let mut boundary_perm = Vec::new();
        let mut conjugators = Vec::new();
        for b in surface.boundary_words() {
            let img = substitute(&images, b);
            let (j, c) = match_boundary(surface, &img).ok_or_else(|| {
                Error::InvalidSurface(format!(
                    "{label}: boundary {} maps to {}, not a boundary conjugate",
                    word::format(b),
                    word::format(&img)
                ))
            })?;
            boundary_perm.push(j);
            conjugators.push(c);
        }
        let mut seen = boundary_perm.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != boundary_perm.len() {
            return Err(Error::InvalidSurface(format!("{label}: boundary action is not a permutation")));
        }
        Ok(MCGAutomorphism {
            label: label.to_string(),
            images,
            inverse_images,
            boundary_perm,
            conjugators,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn boundary_perm(&self) -> &[usize] {
        &self.boundary_perm
    }

    pub fn fixes_boundary(&self) -> bool {
        self.boundary_perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self, surface: &RibbonSurface) -> Self {
        let label = match self.label.strip_suffix("^-1") {
            Some(base) => base.to_string(),
            None => format!("{}^-1", self.label),
        };
        Self::from_words(surface, &label, self.inverse_images.clone(), self.images.clone())
            .expect("inverse of a valid automorphism validates")
    }

    /// `self` followed by `next`.
    pub fn then(&self, surface: &RibbonSurface, next: &Self) -> Self {
        let images = self.images.iter().map(|w| substitute(&next.images, w)).collect();
        let inverse_images = next
            .inverse_images
            .iter()
            .map(|w| substitute(&self.inverse_images, w))
            .collect();
        Self::from_words(surface, &format!("{}.{}", self.label, next.label), images, inverse_images)
            .expect("composition of valid automorphisms validates")
    }

    pub fn apply_word(&self, w: &[Letter]) -> Word {
        substitute(&self.images, w)
    }

    pub fn apply_curve(&self, surface: &RibbonSurface, c: &CurveClass) -> CurveClass {
        classes::canonical_curve(surface, &self.apply_word(c.word())).expect("automorphisms preserve nontriviality")
    }

    pub fn apply_arc(&self, surface: &RibbonSurface, a: &ArcClass) -> ArcClass {
        let (s, e) = (a.start(), a.end());
        let mut w = Vec::with_capacity(a.word().len() * 2 + 8);
        for l in self.conjugators[s].iter().rev() {
            word::push_reduced(&mut w, l.inv());
        }
        substitute_into(&mut w, &self.images, a.word());
        for &l in &self.conjugators[e] {
            word::push_reduced(&mut w, l);
        }
        classes::canonical_arc(surface, self.boundary_perm[s], self.boundary_perm[e], &w)
            .expect("automorphisms preserve essential arcs")
    }

    pub fn apply(&self, surface: &RibbonSurface, x: &Class) -> Class {
        match x {
            Class::Curve(c) => Class::Curve(self.apply_curve(surface, c)),
            Class::Arc(a) => Class::Arc(self.apply_arc(surface, a)),
        }
    }

    pub fn apply_multi(&self, surface: &RibbonSurface, x: &MultiClass) -> Result<MultiClass> {
        let mut out = MultiClass::empty(x.kind());
        for (c, w) in x.terms() {
            out.add(self.apply(surface, c), *w)?;
        }
        Ok(out)
    }

    /// Action on `H_1(Σ; ℤ)`: column `j` is the abelianized image of
    /// generator `j`.
    pub fn homology_matrix(&self, rank: usize) -> Vec<Vec<i64>> {
        let cols: Vec<Vec<i64>> = self.images.iter().map(|w| word::abelianize(w, rank)).collect();
        (0..rank).map(|i| (0..rank).map(|j| cols[j][i]).collect()).collect()
    }
}

impl fmt::Display for MCGAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        for (i, w) in self.images.iter().enumerate() {
            write!(f, " {}->{}", Letter::gen(i), word::format(w))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Use {
    Both,
    SetwiseOnly,
    FixedOnly,
}

struct GeneratorSpec {
    label: &'static str,
    images: &'static [&'static str],
    inverse_images: &'static [&'static str],
    used: Use,
}

const fn spec(
    label: &'static str,
    images: &'static [&'static str],
    inverse_images: &'static [&'static str],
    used: Use,
) -> GeneratorSpec {
    GeneratorSpec { label, images, inverse_images, used }
}

const S_1_1_GENS: &[GeneratorSpec] = &[
    spec("T_a", &["a", "ba"], &["a", "ba'"], Use::Both),
    spec("T_b", &["ab'", "b"], &["ab", "b"], Use::Both),
];

// Boundaries a, b, c, d = a'c'b', so b·c·a·d = 1 and the half-twists H are
// the braid generators on the punctures in the order b, c, a, d. The full
// twists T_bc = H_bc², T_ca = H_ca² generate the pure subgroup.
const S_0_4_GENS: &[GeneratorSpec] = &[
    spec("H_bc", &["a", "bcb'", "b"], &["a", "c", "c'bc"], Use::SetwiseOnly),
    spec("H_ca", &["c", "b", "cac'"], &["a'ca", "b", "a"], Use::SetwiseOnly),
    spec("H_ad", &["c'b'a'", "b", "c"], &["a'c'b'", "b", "c"], Use::SetwiseOnly),
    spec("T_bc", &["a", "bcbc'b'", "bcb'"], &["a", "c'bc", "c'b'cbc"], Use::FixedOnly),
    spec("T_ca", &["cac'", "b", "caca'c'"], &["a'c'aca", "b", "a'ca"], Use::FixedOnly),
];

// T_e twists the curve e = a·c, which is disjoint from a and separated from
// it by the second boundary. W exchanges the two boundary components.
const S_1_2_GENS: &[GeneratorSpec] = &[
    spec("T_a", &["a", "ba", "a'ca"], &["a", "ba'", "aca'"], Use::Both),
    spec("T_b", &["ab'", "b", "c"], &["ab", "b", "c"], Use::Both),
    spec("T_e", &["a", "bca", "c"], &["a", "ba'c'", "c"], Use::Both),
    spec("W", &["a", "b", "c'b'aba'"], &["a", "b", "b'aba'c'"], Use::SetwiseOnly),
];

/// Standard twist generators for a preset (without inverses).
pub fn preset_generators(surface: &RibbonSurface, convention: BoundaryConvention) -> Result<Vec<MCGAutomorphism>> {
    surface.require_countable()?;
    let specs = match surface.name() {
        "S_1_1" => S_1_1_GENS,
        "S_0_4" => S_0_4_GENS,
        "S_1_2" => S_1_2_GENS,
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    let mut out = Vec::new();
    for s in specs {
        let wanted = match convention {
            BoundaryConvention::Setwise => s.used != Use::FixedOnly,
            BoundaryConvention::Fixed => s.used != Use::SetwiseOnly,
        };
        if wanted {
            let phi = MCGAutomorphism::new(surface, s.label, s.images, s.inverse_images)?;
            if convention == BoundaryConvention::Fixed && !phi.fixes_boundary() {
                return Err(Error::InvalidSurface(format!("{} permutes boundaries", s.label)));
            }
            out.push(phi);
        }
    }
    Ok(out)
}

/// Generators together with their inverses, in a fixed order.
pub fn symmetric_generators(surface: &RibbonSurface, convention: BoundaryConvention) -> Result<Vec<MCGAutomorphism>> {
    let gens = preset_generators(surface, convention)?;
    let mut out = Vec::with_capacity(2 * gens.len());
    for g in gens {
        out.push(g.inverse(surface));
        out.push(g);
    }
    Ok(out)
}

/// Square matrices over `ℤ/m`.
pub type ModMatrix = Vec<Vec<u32>>;

pub fn mat_identity(n: usize) -> ModMatrix {
    (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect()
}

pub fn mat_mul(x: &ModMatrix, y: &ModMatrix, m: u32) -> ModMatrix {
    let n = x.len();
    let mut out = vec![vec![0u32; n]; n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i][k] as u64;
            if xik == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = ((out[i][j] as u64 + xik * y[k][j] as u64) % m as u64) as u32;
            }
        }
    }
    out
}

/// The kernel of the action on `H_1(Σ; ℤ/m)`, a finite-index normal
/// subgroup of the mapping class group.
#[derive(Clone, Debug)]
pub struct SubgroupSpec {
    modulus: u32,
    rank: usize,
    labels: Vec<String>,
    matrices: Vec<ModMatrix>,
}

impl SubgroupSpec {
    pub fn homology_kernel(surface: &RibbonSurface, generators: &[MCGAutomorphism], modulus: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Config(format!("modulus must be at least 2, got {modulus}")));
        }
        let rank = surface.rank();
        let m = modulus as i64;
        let mut labels = Vec::new();
        let mut matrices = Vec::new();
        for g in generators {
            let mat: ModMatrix = g
                .homology_matrix(rank)
                .into_iter()
                .map(|row| row.into_iter().map(|x| x.rem_euclid(m) as u32).collect())
                .collect();
            labels.push(g.label().to_string());
            matrices.push(mat);
        }
        let spec = SubgroupSpec { modulus, rank, labels, matrices };
        // Each generator's matrix must be inverted by its inverse's matrix.
        for (i, g) in generators.iter().enumerate() {
            let inv = g.inverse(surface);
            if let Some(j) = spec.labels.iter().position(|l| l == inv.label()) {
                let prod = mat_mul(&spec.matrices[i], &spec.matrices[j], modulus);
                if prod != mat_identity(rank) {
                    return Err(Error::InvalidSurface(format!("{} is not invertible mod {modulus}", g.label())));
                }
            }
        }
        Ok(spec)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self, label: &str) -> Option<&ModMatrix> {
        self.labels.iter().position(|l| l == label).map(|i| &self.matrices[i])
    }

    /// Matrix of the product applying `labels` left to right.
    pub fn word_matrix(&self, labels: &[&str]) -> Result<ModMatrix> {
        let mut acc = mat_identity(self.rank);
        for l in labels {
            let mat = self
                .matrix(l)
                .ok_or_else(|| Error::Config(format!("unknown generator label {l:?}")))?;
            acc = mat_mul(mat, &acc, self.modulus);
        }
        Ok(acc)
    }

    pub fn in_subgroup(&self, labels: &[&str]) -> Result<bool> {
        Ok(self.word_matrix(labels)? == mat_identity(self.rank))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_preset, PRESET_NAMES};

    #[test]
    fn presets_generate_valid_automorphisms() {
        for name in &PRESET_NAMES[..3] {
            let s = make_preset(name).unwrap();
            for conv in [BoundaryConvention::Setwise, BoundaryConvention::Fixed] {
                let gens = symmetric_generators(&s, conv).unwrap();
                assert!(!gens.is_empty());
                if conv == BoundaryConvention::Fixed {
                    assert!(gens.iter().all(|g| g.fixes_boundary()), "{name}");
                }
            }
        }
        let pants = make_preset("S_0_3").unwrap();
        assert!(matches!(preset_generators(&pants, BoundaryConvention::Setwise), Err(Error::PairOfPants)));
    }

    #[test]
    fn twist_a_on_torus() {
        let s = make_preset("S_1_1").unwrap();
        let ta = &preset_generators(&s, BoundaryConvention::Setwise).unwrap()[0];
        let b = CurveClass::parse(&s, "b").unwrap();
        assert_eq!(ta.apply_curve(&s, &b), CurveClass::parse(&s, "ba").unwrap());
        let id = MCGAutomorphism::identity(&s);
        assert_eq!(id.apply_curve(&s, &b), b);
    }

    #[test]
    fn half_twists_permute_boundaries() {
        let s = make_preset("S_0_4").unwrap();
        let gens = preset_generators(&s, BoundaryConvention::Setwise).unwrap();
        let perms: Vec<&[usize]> = gens.iter().map(|g| g.boundary_perm()).collect();
        assert_eq!(perms, [&[0, 2, 1, 3][..], &[2, 1, 0, 3], &[3, 1, 2, 0]]);
        let s = make_preset("S_1_2").unwrap();
        let w = preset_generators(&s, BoundaryConvention::Setwise).unwrap().pop().unwrap();
        assert_eq!(w.boundary_perm(), [1, 0]);
    }

    #[test]
    fn mod_two_membership() {
        let s = make_preset("S_1_1").unwrap();
        let gens = symmetric_generators(&s, BoundaryConvention::Setwise).unwrap();
        let g = SubgroupSpec::homology_kernel(&s, &gens, 2).unwrap();
        assert!(g.in_subgroup(&[]).unwrap());
        assert!(!g.in_subgroup(&["T_a"]).unwrap());
        assert!(g.in_subgroup(&["T_a", "T_a"]).unwrap());
        assert!(g.in_subgroup(&["T_a", "T_a^-1"]).unwrap());
        assert!(g.in_subgroup(&["T_x"]).is_err());
    }
}
