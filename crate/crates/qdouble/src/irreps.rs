//! Unitary matrix irreps for the supported group families, built from closed
//! forms: roots of unity for cyclic groups, 2x2 rotation/swap blocks for
//! dihedral groups, and tensor products for direct products.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, GroupKind, Subgroup};
use crate::tol;

type C64 = Complex64;

fn root_of_unity(num: i64, den: i64) -> C64 {
    // exp(2 pi i num/den)
    let theta = 2.0 * PI * (num as f64) / (den as f64);
    C64::new(theta.cos(), theta.sin())
}

/// A unitary matrix irrep: one `dim x dim` matrix per group element.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub name: String,
    pub dim: usize,
    /// Row-major `dim*dim` matrix per element index.
    matrices: Vec<Vec<C64>>,
}

impl Irrep {
    pub fn matrix(&self, g: GroupElement) -> &[C64] {
        &self.matrices[g]
    }

    pub fn entry(&self, g: GroupElement, row: usize, col: usize) -> C64 {
        self.matrices[g][row * self.dim + col]
    }

    pub fn character(&self, g: GroupElement) -> C64 {
        (0..self.dim).map(|i| self.entry(g, i, i)).sum()
    }
}

/// Complete list of pairwise inequivalent irreps; trivial first, then the
/// remaining one-dimensional ones, then higher dimensions.
pub fn irreps(group: &FiniteGroup) -> Result<Vec<Irrep>> {
    let list = irreps_of_kind(group.kind(), group)?;
    let total: usize = list.iter().map(|r| r.dim * r.dim).sum();
    assert_eq!(
        total,
        group.order(),
        "irrep dimension sum check failed for {}",
        group.kind()
    );
    Ok(list)
}

fn irreps_of_kind(kind: &GroupKind, group: &FiniteGroup) -> Result<Vec<Irrep>> {
    match kind {
        GroupKind::Cyclic(n) => Ok(cyclic_irreps(*n)),
        GroupKind::Dihedral(k) => Ok(dihedral_irreps(*k)),
        GroupKind::Symmetric3 => {
            let mut list = dihedral_irreps(3);
            list[1].name = "P".to_string();
            Ok(list)
        }
        GroupKind::Product(ka, kb) => {
            let ga = crate::group::build_group(ka)?;
            let gb = crate::group::build_group(kb)?;
            let ra = irreps(&ga)?;
            let rb = irreps(&gb)?;
            let mut list = Vec::new();
            for a in &ra {
                for b in &rb {
                    list.push(tensor_irrep(a, b, &ga, &gb));
                }
            }
            list.sort_by_key(|r| r.dim);
            let _ = group;
            Ok(list)
        }
    }
}

fn cyclic_irreps(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|j| {
            let name = match j {
                0 => "1".to_string(),
                1 => "e".to_string(),
                _ => format!("e^{j}"),
            };
            let matrices = (0..n)
                .map(|a| vec![root_of_unity((j * a) as i64, n as i64)])
                .collect();
            Irrep { name, dim: 1, matrices }
        })
        .collect()
}

fn dihedral_irreps(k: usize) -> Vec<Irrep> {
    let n = 2 * k;
    let idx = |a: usize, b: usize| b * k + a;
    let one_dim = |name: &str, f: &dyn Fn(usize, usize) -> f64| -> Irrep {
        let mut matrices = vec![Vec::new(); n];
        for a in 0..k {
            for b in 0..2 {
                matrices[idx(a, b)] = vec![C64::new(f(a, b), 0.0)];
            }
        }
        Irrep { name: name.to_string(), dim: 1, matrices }
    };
    let mut list = vec![one_dim("1", &|_, _| 1.0)];
    if k % 2 == 0 {
        list.push(one_dim("1_r", &|_, b| if b % 2 == 0 { 1.0 } else { -1.0 }));
        list.push(one_dim("1_s", &|a, _| if a % 2 == 0 { 1.0 } else { -1.0 }));
        list.push(one_dim("1_rs", &|a, b| if (a + b) % 2 == 0 { 1.0 } else { -1.0 }));
    } else {
        list.push(one_dim("P", &|_, b| if b % 2 == 0 { 1.0 } else { -1.0 }));
    }
    let two_dim_count = if k % 2 == 0 { k / 2 - 1 } else { (k - 1) / 2 };
    for j in 1..=two_dim_count {
        let name = if two_dim_count == 1 { "E".to_string() } else { format!("E{j}") };
        let mut matrices = vec![Vec::new(); n];
        for a in 0..k {
            let w = root_of_unity((j * a) as i64, k as i64);
            let wi = root_of_unity(-((j * a) as i64), k as i64);
            let zero = C64::new(0.0, 0.0);
            // E_j(r^a) = diag(w^ja, w^-ja); E_j(r^a s) = E_j(r^a) * swap
            matrices[idx(a, 0)] = vec![w, zero, zero, wi];
            matrices[idx(a, 1)] = vec![zero, w, wi, zero];
        }
        list.push(Irrep { name, dim: 2, matrices });
    }
    list
}

fn tensor_irrep(a: &Irrep, b: &Irrep, ga: &FiniteGroup, gb: &FiniteGroup) -> Irrep {
    let dim = a.dim * b.dim;
    let mut matrices = Vec::with_capacity(ga.order() * gb.order());
    for ea in ga.elements() {
        for eb in gb.elements() {
            let mut m = vec![C64::new(0.0, 0.0); dim * dim];
            for i1 in 0..a.dim {
                for j1 in 0..a.dim {
                    for i2 in 0..b.dim {
                        for j2 in 0..b.dim {
                            let row = i1 * b.dim + i2;
                            let col = j1 * b.dim + j2;
                            m[row * dim + col] = a.entry(ea, i1, j1) * b.entry(eb, i2, j2);
                        }
                    }
                }
            }
            matrices.push(m);
        }
    }
    let name = if a.name == "1" && b.name == "1" {
        "1".to_string()
    } else {
        format!("{}|{}", a.name, b.name)
    };
    Irrep { name, dim, matrices }
}

/// A character-level irrep of a centralizer subgroup, enough for anyon data.
#[derive(Clone, Debug)]
pub struct CharIrrep {
    pub name: String,
    pub dim: usize,
    /// Character value per member position of the subgroup.
    values: Vec<C64>,
}

impl CharIrrep {
    pub fn character(&self, sub: &Subgroup, g: GroupElement) -> C64 {
        self.values[sub.position(g).expect("element outside centralizer")]
    }
}

/// Irreducible characters of a centralizer `C`, labeled the way the anyon
/// tables are read:
/// - `C = G`: the ambient group's irrep names;
/// - cyclic `C`: characters ordered and named by their value on a canonical
///   generator (or on `preferred` when it generates);
/// - Klein four-group: sign pairs `(++, +-, --, -+)` on `(g1, g2)` where `g1`
///   is `preferred` (the class representative) and `g2` the smallest other
///   member.
pub fn centralizer_irreps(c: &Subgroup, preferred: Option<GroupElement>) -> Result<Vec<CharIrrep>> {
    let g = c.parent();
    if c.order() == g.order() {
        let list = irreps(g)?;
        return Ok(list
            .into_iter()
            .map(|r| CharIrrep {
                name: r.name.clone(),
                dim: r.dim,
                values: c.members().iter().map(|&m| r.character(m)).collect(),
            })
            .collect());
    }
    if c.is_cyclic() {
        let n = c.order();
        let generator = match preferred {
            Some(p) if c.contains(p) && g.element_order(p) == n => p,
            _ => c.max_order_generator(),
        };
        // Discrete log of each member with respect to the generator.
        let mut dlog = vec![0usize; n];
        let mut x = 0;
        for t in 0..n {
            dlog[c.position(x).unwrap()] = t;
            x = g.mul(x, generator);
        }
        return Ok((0..n)
            .map(|j| {
                let values = (0..n).map(|pos| root_of_unity((j * dlog[pos]) as i64, n as i64)).collect();
                let name = match (n, j) {
                    (_, 0) => "1".to_string(),
                    (2, 1) => "-".to_string(),
                    (3, 1) => "w".to_string(),
                    (3, 2) => "w2".to_string(),
                    (4, 1) => "i".to_string(),
                    (4, 2) => "-1".to_string(),
                    (4, 3) => "-i".to_string(),
                    _ => format!("w{j}"),
                };
                CharIrrep { name, dim: 1, values }
            })
            .collect());
    }
    if c.order() == 4 {
        // Klein four-group.
        let g1 = match preferred {
            Some(p) if c.contains(p) && p != 0 => p,
            _ => c.members()[1],
        };
        let g2 = *c
            .members()
            .iter()
            .find(|&&m| m != 0 && m != g1)
            .expect("Klein group has four members");
        let coords = |x: GroupElement| -> (usize, usize) {
            if x == 0 {
                (0, 0)
            } else if x == g1 {
                (1, 0)
            } else if x == g2 {
                (0, 1)
            } else {
                (1, 1)
            }
        };
        let signs = [(0usize, 0usize), (0, 1), (1, 1), (1, 0)];
        return Ok(signs
            .iter()
            .map(|&(s1, s2)| {
                let values = c
                    .members()
                    .iter()
                    .map(|&m| {
                        let (x1, x2) = coords(m);
                        let sign = if (s1 * x1 + s2 * x2) % 2 == 0 { 1.0 } else { -1.0 };
                        C64::new(sign, 0.0)
                    })
                    .collect();
                let pm = |s: usize| if s == 0 { "+" } else { "-" };
                CharIrrep { name: format!("{}{}", pm(s1), pm(s2)), dim: 1, values }
            })
            .collect());
    }
    Err(Error::Unsupported(format!(
        "centralizer of order {} outside the supported families",
        c.order()
    )))
}

/// Exhaustive Schur orthogonality check, used by tests and `verify` runs.
pub fn schur_orthogonality_ok(group: &FiniteGroup, list: &[Irrep]) -> bool {
    for (ri, r) in list.iter().enumerate() {
        for (si, s) in list.iter().enumerate() {
            for i in 0..r.dim {
                for j in 0..r.dim {
                    for k in 0..s.dim {
                        for l in 0..s.dim {
                            let sum: C64 = group
                                .elements()
                                .map(|g| r.entry(g, i, j) * s.entry(g, k, l).conj())
                                .sum();
                            let expect = if ri == si && i == k && j == l {
                                C64::new(group.order() as f64 / r.dim as f64, 0.0)
                            } else {
                                C64::new(0.0, 0.0)
                            };
                            if (sum - expect).norm() > tol::EXACT * group.order() as f64 {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}
