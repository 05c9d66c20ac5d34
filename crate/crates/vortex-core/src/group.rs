//! Finite groups as Cayley tables, unitary representations, and the cyclic
//! Higgs groups `Z_k` with exact rational phases.
//!
//! Elements are indices `0..order`, and index 0 is always the identity.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, OrientedEdge};
use crate::linalg::{CMatrix, C64};
use crate::paths::check_contiguous;

/// Tolerance for representation checks.
pub const REP_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Validates a row-major Cayley table: closure, identity at index 0,
    /// Latin-square rows and columns, associativity.
    pub fn from_table(order: usize, table: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        if order == 0 {
            return Err(Error::GroupTable("empty group".into()));
        }
        if table.len() != order * order {
            return Err(Error::GroupTable(format!("table has {} entries, expected {}", table.len(), order * order)));
        }
        if let Some(bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::GroupTable(format!("entry {bad} is not an element")));
        }
        for a in 0..order {
            if table[a] != a || table[a * order] != a {
                return Err(Error::GroupTable("index 0 is not the identity".into()));
            }
        }
        let mut seen = vec![false; order];
        for r in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for c in 0..order {
                seen[table[r * order + c]] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::GroupTable(format!("row {r} is not a permutation")));
            }
            seen.iter_mut().for_each(|s| *s = false);
            for c in 0..order {
                seen[table[c * order + r]] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::GroupTable(format!("column {r} is not a permutation")));
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = table[a * order + b];
                for c in 0..order {
                    if table[ab * order + c] != table[a * order + table[b * order + c]] {
                        return Err(Error::GroupTable(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let inverse = (0..order).map(|a| (0..order).find(|&b| table[a * order + b] == 0).expect("latin square")).collect();
        let labels = if labels.len() == order { labels } else { (0..order).map(|i| i.to_string()).collect() };
        Ok(Self { order, table, inverse, labels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Ordered product along an oriented path, left to right, with the
    /// reversed edge carrying the inverse element.
    pub fn path_product(&self, lat: &Lattice, sigma: &[usize], path: &[OrientedEdge]) -> Result<usize> {
        if path.is_empty() {
            return Ok(0);
        }
        check_contiguous(lat, path)?;
        Ok(self.chain_product(sigma, path))
    }

    /// Same as [`path_product`](Self::path_product) without the contiguity check.
    #[inline]
    pub fn chain_product(&self, sigma: &[usize], path: &[OrientedEdge]) -> usize {
        path.iter().fold(0, |acc, oe| {
            let s = sigma[oe.edge];
            self.mul(acc, if oe.forward { s } else { self.inv(s) })
        })
    }
}

/// A unitary representation given by one matrix per group element.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryRep {
    dim: usize,
    mats: Vec<CMatrix>,
    chars: Vec<C64>,
    trivial: Vec<bool>,
}

impl UnitaryRep {
    /// Checks unitarity and the homomorphism property to [`REP_TOL`].
    pub fn new(group: &FiniteGroup, mats: Vec<CMatrix>) -> Result<Self> {
        if mats.len() != group.order() {
            return Err(Error::Representation { what: "one matrix per element", err: f64::INFINITY });
        }
        let dim = mats[0].dim();
        if dim == 0 || mats.iter().any(|m| m.dim() != dim) {
            return Err(Error::Representation { what: "uniform dimension", err: f64::INFINITY });
        }
        let id = CMatrix::identity(dim);
        for m in &mats {
            let err = m.mul(&m.adjoint()).max_abs_diff(&id);
            if !(err <= REP_TOL) {
                return Err(Error::Representation { what: "unitarity", err });
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let err = mats[a].mul(&mats[b]).max_abs_diff(&mats[group.mul(a, b)]);
                if !(err <= REP_TOL) {
                    return Err(Error::Representation { what: "homomorphism", err });
                }
            }
        }
        let chars = mats.iter().map(CMatrix::trace).collect();
        let trivial = mats.iter().map(|m| m.max_abs_diff(&id) <= 1e-9).collect();
        Ok(Self { dim, mats, chars, trivial })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.mats[g]
    }

    /// `Tr rho(g)`.
    #[inline]
    pub fn character(&self, g: usize) -> C64 {
        self.chars[g]
    }

    pub fn characters(&self) -> &[C64] {
        &self.chars
    }

    /// Whether `rho(g)` is the identity matrix.
    #[inline]
    pub fn is_trivial(&self, g: usize) -> bool {
        self.trivial[g]
    }

    pub fn is_faithful(&self) -> bool {
        self.trivial.iter().skip(1).all(|t| !t)
    }

    /// Elements mapped to the identity.
    pub fn kernel(&self) -> Vec<usize> {
        (0..self.mats.len()).filter(|&g| self.trivial[g]).collect()
    }

    /// The image of the group intersected with scalar matrices, as exact
    /// phases, sorted and deduplicated.
    pub fn scalar_subgroup(&self, group: &FiniteGroup) -> Vec<Phase> {
        let n = group.order() as u64;
        let mut out: Vec<Phase> = self
            .mats
            .iter()
            .filter_map(|m| m.as_scalar(1e-9))
            .map(|c| Phase::from_complex(c, n).expect("scalar of a finite group rep is an n-th root of unity"))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A root of unity `exp(2 pi i num / den)` with `0 <= num < den`, reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase {
    pub num: u64,
    pub den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Phase {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let num = num % den;
        let g = gcd(num, den).max(1);
        Self { num: num / g, den: den / g }
    }

    /// Recovers the phase of a unit complex number known to be an `n`-th root of unity.
    pub fn from_complex(c: C64, n: u64) -> Option<Self> {
        let mut t = libm::atan2(c.im, c.re) / (2.0 * PI);
        if t < 0.0 {
            t += 1.0;
        }
        let j = libm::round(t * n as f64);
        let p = Self::new(j as u64 % n, n);
        ((p.value() - c).norm() < 1e-9).then_some(p)
    }

    pub fn value(self) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * self.num as f64 / self.den as f64)
    }
}

/// Built-in group families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    Quaternion,
    Symmetric3,
}

/// Which representation of a built-in group to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepChoice {
    /// The default faithful choice: `k -> exp(2 pi i k / n)` for `Z_n`, the
    /// 2-dimensional irreps for `Q8` and `S3`.
    Faithful,
    Trivial,
    /// `k -> exp(2 pi i m k / n)` on `Z_n`.
    Character(usize),
    /// The sign character of `S3`, or for `Q8` the 1-dimensional character
    /// that is `+1` on `+-i`.
    Sign,
    /// The 3-dimensional permutation representation of `S3`.
    Permutation,
}

/// Builds one of the built-in groups with a chosen representation.
pub fn make_group(kind: GroupKind, rep: RepChoice) -> Result<(FiniteGroup, UnitaryRep)> {
    let (group, mats) = match kind {
        GroupKind::Cyclic(n) => cyclic(n, rep)?,
        GroupKind::Quaternion => quaternion(rep)?,
        GroupKind::Symmetric3 => symmetric3(rep)?,
    };
    let rep = UnitaryRep::new(&group, mats)?;
    Ok((group, rep))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unsupported(kind: &str, rep: RepChoice) -> Error {
    Error::GroupTable(format!("representation {rep:?} is not available for {kind}"))
}

fn cyclic(n: usize, rep: RepChoice) -> Result<(FiniteGroup, Vec<CMatrix>)> {
    if n == 0 {
        return Err(Error::GroupTable("Z_0 is not a group".into()));
    }
    let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
    let group = FiniteGroup::from_table(n, table, (0..n).map(|k| k.to_string()).collect())?;
    let m = match rep {
        RepChoice::Faithful => 1,
        RepChoice::Trivial => 0,
        RepChoice::Character(m) => m % n,
        _ => return Err(unsupported("Z_n", rep)),
    };
    let mats = (0..n).map(|k| CMatrix::scalar(1, Phase::new((m * k) as u64, n as u64).value())).collect();
    Ok((group, mats))
}

fn quaternion(rep: RepChoice) -> Result<(FiniteGroup, Vec<CMatrix>)> {
    // element index = 2 * unit + (sign == -1), units 1, i, j, k
    const UNIT_MUL: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let mut table = vec![0; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (neg, u) = UNIT_MUL[a / 2][b / 2];
            let sign = neg ^ (a % 2 == 1) ^ (b % 2 == 1);
            table[a * 8 + b] = 2 * u + sign as usize;
        }
    }
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].iter().map(|s| s.to_string()).collect();
    let group = FiniteGroup::from_table(8, table, labels)?;
    let units: [CMatrix; 4] = match rep {
        RepChoice::Faithful => [
            CMatrix::identity(2),
            CMatrix::from_rows(2, vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
            CMatrix::from_rows(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]),
            CMatrix::from_rows(2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        ],
        RepChoice::Trivial => core::array::from_fn(|_| CMatrix::identity(1)),
        RepChoice::Sign => [1.0, 1.0, -1.0, -1.0].map(|s| CMatrix::scalar(1, c(s, 0.0))),
        _ => return Err(unsupported("Q8", rep)),
    };
    let mats = (0..8)
        .map(|g| {
            let m = &units[g / 2];
            if g % 2 == 1 && m.dim() == 2 {
                m.scale(c(-1.0, 0.0))
            } else {
                m.clone()
            }
        })
        .collect();
    Ok((group, mats))
}

fn symmetric3(rep: RepChoice) -> Result<(FiniteGroup, Vec<CMatrix>)> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("permutation of 3");
    let mut table = vec![0; 36];
    for a in 0..6 {
        for b in 0..6 {
            // (p q)(x) = p(q(x))
            table[a * 6 + b] = index(core::array::from_fn(|x| perms[a][perms[b][x]]));
        }
    }
    let labels = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
    let group = FiniteGroup::from_table(6, table, labels)?;
    let perm_matrix = |p: &[usize; 3]| {
        let mut m = CMatrix::zeros(3);
        for x in 0..3 {
            m.set(p[x], x, c(1.0, 0.0));
        }
        m
    };
    let parity = |p: &[usize; 3]| {
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mats = match rep {
        RepChoice::Permutation => perms.iter().map(perm_matrix).collect(),
        RepChoice::Trivial => vec![CMatrix::identity(1); 6],
        RepChoice::Sign => perms.iter().map(|p| CMatrix::scalar(1, c(parity(p), 0.0))).collect(),
        RepChoice::Faithful => {
            // orthonormal basis of the sum-zero plane
            let s2 = libm::sqrt(2.0);
            let s6 = libm::sqrt(6.0);
            let basis = [[1.0 / s2, -1.0 / s2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6]];
            perms
                .iter()
                .map(|p| {
                    let mut m = CMatrix::zeros(2);
                    for r in 0..2 {
                        for col in 0..2 {
                            // basis[r] . P basis[col], with (P u)[p(x)] = u[x]
                            let v: f64 = (0..3).map(|x| basis[r][p[x]] * basis[col][x]).sum();
                            m.set(r, col, c(v, 0.0));
                        }
                    }
                    m
                })
                .collect()
        }
        _ => return Err(unsupported("S3", rep)),
    };
    Ok((group, mats))
}

/// Result of quotienting by the kernel of a representation.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteGroup,
    pub rep: UnitaryRep,
    /// Coset index of each original element.
    pub coset_of: Vec<usize>,
    /// Smallest original element in each coset.
    pub representative: Vec<usize>,
}

/// Replaces `(G, rho)` by `(G / ker rho, rho)`, which is faithful.
pub fn quotient_by_kernel(group: &FiniteGroup, rep: &UnitaryRep) -> Result<Quotient> {
    let kernel = rep.kernel();
    let n = group.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut representative = Vec::new();
    for g in 0..n {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let id = representative.len();
        representative.push(g);
        for &k in &kernel {
            coset_of[group.mul(g, k)] = id;
        }
    }
    let m = representative.len();
    let table = (0..m * m).map(|i| coset_of[group.mul(representative[i / m], representative[i % m])]).collect();
    let labels = representative.iter().map(|&g| group.label(g).to_string()).collect();
    let qg = FiniteGroup::from_table(m, table, labels)?;
    let mats = representative.iter().map(|&g| rep.matrix(g).clone()).collect();
    let qrep = UnitaryRep::new(&qg, mats)?;
    Ok(Quotient { group: qg, rep: qrep, coset_of, representative })
}

/// The cyclic Higgs group `Z_k`; element `j` is the phase `exp(2 pi i j / k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HiggsGroup {
    order: usize,
}

impl HiggsGroup {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::GroupTable("Z_0 is not a group".into()));
        }
        Ok(Self { order })
    }

    pub fn order(self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    #[inline]
    pub fn inv(self, a: usize) -> usize {
        (self.order - a) % self.order
    }

    /// `phi_x phi_y^{-1}`.
    #[inline]
    pub fn ratio(self, x: usize, y: usize) -> usize {
        (x + self.order - y) % self.order
    }

    pub fn phase(self, j: usize) -> Phase {
        Phase::new(j as u64, self.order as u64)
    }

    pub fn value(self, j: usize) -> C64 {
        self.phase(j).value()
    }

    /// The element equal to `p`, if `p` is a `k`-th root of unity.
    pub fn element_of(self, p: Phase) -> Option<usize> {
        let k = self.order as u64;
        ((p.num * k) % p.den == 0).then(|| ((p.num * k) / p.den) as usize)
    }

    /// Coset representatives of `Z_k / X` (smallest phase in each coset).
    pub fn quotient_representatives(self, scalars: &[Phase]) -> Result<Vec<usize>> {
        let xs = scalars.iter().map(|&p| self.element_of(p)).collect::<Option<Vec<_>>>();
        let xs = xs.ok_or(Error::HiggsQuotient { order: self.order })?;
        let mut reps = Vec::new();
        let mut covered = vec![false; self.order];
        for j in 0..self.order {
            if covered[j] {
                continue;
            }
            reps.push(j);
            covered[j] = true;
            for &x in &xs {
                covered[self.mul(j, x)] = true;
            }
        }
        Ok(reps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_faithful() {
        let (g, r) = make_group(GroupKind::Cyclic(2), RepChoice::Faithful).unwrap();
        assert_eq!(g.mul(1, 1), 0);
        assert!((r.character(1) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quaternion_relations() {
        let (g, r) = make_group(GroupKind::Quaternion, RepChoice::Faithful).unwrap();
        let (i, j, k, m1) = (2, 4, 6, 1);
        assert_eq!(g.mul(i, j), k);
        assert_eq!(g.mul(j, i), 7);
        assert_eq!(g.mul(i, i), m1);
        assert_eq!(g.mul(g.mul(i, j), k), m1);
        assert!(!g.is_abelian());
        assert!(r.is_faithful());
        assert_eq!(r.scalar_subgroup(&g), vec![Phase::new(0, 1), Phase::new(1, 2)]);
    }

    #[test]
    fn s3_reps() {
        for rep in [RepChoice::Faithful, RepChoice::Sign, RepChoice::Permutation, RepChoice::Trivial] {
            let (g, r) = make_group(GroupKind::Symmetric3, rep).unwrap();
            assert_eq!(g.order(), 6);
            assert!((r.character(0).re - r.dim() as f64).abs() < 1e-12);
        }
        let (_, std) = make_group(GroupKind::Symmetric3, RepChoice::Faithful).unwrap();
        let mut chars: Vec<i64> = std.characters().iter().map(|z| libm::round(z.re) as i64).collect();
        chars.sort_unstable();
        assert_eq!(chars, vec![-1, -1, 0, 0, 0, 2]);
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let (g, _) = make_group(GroupKind::Cyclic(3), RepChoice::Faithful).unwrap();
        let mut t = g.table().to_vec();
        t.swap(4, 5);
        assert!(FiniteGroup::from_table(3, t, Vec::new()).is_err());
    }

    #[test]
    fn higgs_quotient_z9() {
        let h = HiggsGroup::new(9).unwrap();
        let x = [Phase::new(0, 9), Phase::new(3, 9), Phase::new(6, 9)];
        assert_eq!(h.quotient_representatives(&x).unwrap(), vec![0, 1, 2]);
        assert!(HiggsGroup::new(4).unwrap().quotient_representatives(&[Phase::new(1, 3)]).is_err());
    }

    #[test]
    fn kernel_quotient_of_sign_rep() {
        let (g, r) = make_group(GroupKind::Symmetric3, RepChoice::Sign).unwrap();
        let q = quotient_by_kernel(&g, &r).unwrap();
        assert_eq!(q.group.order(), 2);
        assert!(q.rep.is_faithful());
    }
}
