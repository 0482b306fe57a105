//! Exact linear algebra over ℤ and ℚ for symmetric integer matrices.
//!
//! The homological content of a surgery presentation with linking matrix `L` is
//! `H₁(M) = ℤᵐ / Lℤᵐ`. Its free rank is the nullity of `L` and its torsion part is the
//! cokernel of the regular block `L_reg`, the form induced on ℤᵐ modulo the saturated
//! kernel. Everything in here is exact; floating point never enters.

mod matrix;
mod smith;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use matrix::{IntMatrix, IntSymMatrix, JsonInt};
pub use smith::{smith_normal_form, SmithForm};

use crate::error::{Error, Result};
use crate::numeric::Rational;

/// Cap on the number of cokernel elements that may be enumerated.
pub const MAX_GROUP_ORDER: u64 = 1_000_000;

/// Splitting `ℤᵐ = span(C) ⊕ span(K)` with `K` a saturated kernel basis of `L`.
#[derive(Clone, Debug)]
pub struct RegularDecomposition {
    /// `m × ρ`
    pub complement: IntMatrix,
    /// `m × ν`
    pub kernel: IntMatrix,
    /// `Cᵀ L C`, nondegenerate.
    pub regular: IntSymMatrix,
    pub rank: usize,
    pub nullity: usize,
}

impl RegularDecomposition {
    /// `[C | K]`, unimodular.
    pub fn basis(&self) -> IntMatrix {
        let m = self.complement.rows();
        let mut cols: Vec<Vec<BigInt>> =
            (0..self.rank).map(|j| self.complement.column(j)).collect();
        cols.extend((0..self.nullity).map(|j| self.kernel.column(j)));
        IntMatrix::from_columns(m, &cols)
    }
}

/// Deterministic regular/kernel split taken from the Smith form of `L`: the columns of
/// `V` at zero invariant factors span the saturated kernel and the remaining columns
/// complete them to a basis of ℤᵐ. A nondegenerate `L` is its own regular block.
pub fn regular_decomposition(l: &IntSymMatrix) -> RegularDecomposition {
    let m = l.dim();
    let snf = smith_normal_form(l.as_matrix());
    let rank = snf.rank();
    if rank == m {
        return RegularDecomposition {
            complement: IntMatrix::identity(m),
            kernel: IntMatrix::zeros(m, 0),
            regular: l.clone(),
            rank,
            nullity: 0,
        };
    }
    let complement =
        IntMatrix::from_columns(m, &(0..rank).map(|j| snf.v.column(j)).collect::<Vec<_>>());
    let kernel =
        IntMatrix::from_columns(m, &(rank..m).map(|j| snf.v.column(j)).collect::<Vec<_>>());
    let regular = l.congruence(&complement);
    debug_assert!(!regular.det().is_zero());
    RegularDecomposition {
        complement,
        kernel,
        regular,
        rank,
        nullity: m - rank,
    }
}

/// Dense matrix over ℚ, only used internally for elimination.
type RatMatrix = Vec<Vec<Rational>>;

fn to_rational(l: &IntSymMatrix) -> RatMatrix {
    (0..l.dim())
        .map(|i| {
            (0..l.dim())
                .map(|j| Rational::from(l[(i, j)].clone()))
                .collect()
        })
        .collect()
}

/// Signature of `L ⊗ ℝ` by exact symmetric congruence diagonalization over ℚ.
///
/// A nonzero diagonal pivot contributes its sign. When the whole remaining diagonal is
/// zero but some `a_ij ≠ 0`, the hyperbolic block `[[0, a], [a, 0]]` is split off; it
/// contributes zero.
pub fn signature(l: &IntSymMatrix) -> i64 {
    let mut a = to_rational(l);
    let mut sig = 0i64;
    while !a.is_empty() {
        let n = a.len();
        if let Some(p) = (0..n).find(|&i| !a[i][i].is_zero()) {
            let pivot = a[p][p].clone();
            sig += if pivot.is_negative() { -1 } else { 1 };
            let rest: Vec<usize> = (0..n).filter(|&i| i != p).collect();
            a = rest
                .iter()
                .map(|&i| {
                    rest.iter()
                        .map(|&j| &a[i][j] - &(&a[i][p] * &a[p][j]) / &pivot)
                        .collect()
                })
                .collect();
            continue;
        }
        let Some((p, q)) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            // zero form: remaining directions are null
            break;
        };
        // Schur complement of the block [[0, c], [c, 0]], whose inverse is [[0, 1/c], [1/c, 0]]
        let c = a[p][q].clone();
        let rest: Vec<usize> = (0..n).filter(|&i| i != p && i != q).collect();
        a = rest
            .iter()
            .map(|&i| {
                rest.iter()
                    .map(|&j| {
                        let cross = &a[i][p] * &a[q][j] + &a[i][q] * &a[p][j];
                        &a[i][j] - &(cross / &c)
                    })
                    .collect()
            })
            .collect();
    }
    sig
}

/// Solves `L y = x` over ℚ. `None` if `L` is singular.
pub fn solve_rational(l: &IntSymMatrix, x: &[Rational]) -> Option<Vec<Rational>> {
    let n = l.dim();
    assert_eq!(x.len(), n, "dimension mismatch");
    let mut a = to_rational(l);
    let mut b = x.to_vec();
    for t in 0..n {
        let p = (t..n).find(|&i| !a[i][t].is_zero())?;
        a.swap(t, p);
        b.swap(t, p);
        let inv = a[t][t].recip()?;
        for i in 0..n {
            if i == t || a[i][t].is_zero() {
                continue;
            }
            let f = &a[i][t] * &inv;
            for j in t..n {
                let v = &a[i][j] - &(&f * &a[t][j]);
                a[i][j] = v;
            }
            let v = &b[i] - &(&f * &b[t]);
            b[i] = v;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Exact `xᵀ L⁻¹ x`.
pub fn inverse_form_value(l_reg: &IntSymMatrix, x: &[BigInt]) -> Result<Rational> {
    inverse_pairing(l_reg, x, x)
}

/// Exact `xᵀ L⁻¹ y`.
pub fn inverse_pairing(l_reg: &IntSymMatrix, x: &[BigInt], y: &[BigInt]) -> Result<Rational> {
    if x.len() != l_reg.dim() || y.len() != l_reg.dim() {
        return Err(Error::IndexOutOfRange(format!(
            "vector of length {} against {}x{} matrix",
            x.len(),
            l_reg.dim(),
            l_reg.dim()
        )));
    }
    let rhs: Vec<Rational> = y.iter().cloned().map(Rational::from).collect();
    let sol = solve_rational(l_reg, &rhs).ok_or(Error::DegenerateMatrix)?;
    Ok(x.iter().zip(&sol).fold(Rational::zero(), |acc, (a, s)| {
        acc + Rational::from(a.clone()) * s
    }))
}

/// `ℤ^ρ / L_reg ℤ^ρ` as a product of cyclic groups `ℤ/d₁ ⊕ … ⊕ ℤ/d_t`, `d₁ | … | d_t`, each `d_i >= 2`.
#[derive(Clone, Debug)]
pub struct CokernelGroup {
    pub cyclic_orders: Vec<BigInt>,
    /// Integer lifts in ℤ^ρ of the cyclic generators.
    pub generator_reps: Vec<Vec<BigInt>>,
    /// Rows of the Smith `U` at the nontrivial factors; `x ↦ (row_i · x) mod d_i`.
    coordinate_rows: Vec<Vec<BigInt>>,
    ambient_dim: usize,
}

impl CokernelGroup {
    pub fn trivial(ambient_dim: usize) -> Self {
        CokernelGroup {
            cyclic_orders: Vec::new(),
            generator_reps: Vec::new(),
            coordinate_rows: Vec::new(),
            ambient_dim,
        }
    }

    pub fn order(&self) -> BigInt {
        self.cyclic_orders.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.cyclic_orders.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Order as a machine integer, or `GroupTooLarge` beyond `MAX_GROUP_ORDER`.
    pub fn enumerable_order(&self) -> Result<u64> {
        let order = self.order();
        match order.to_u64() {
            Some(n) if n <= MAX_GROUP_ORDER => Ok(n),
            _ => Err(Error::GroupTooLarge {
                order: order.to_string(),
                cap: MAX_GROUP_ORDER,
            }),
        }
    }

    pub fn orders_u64(&self) -> Vec<u64> {
        self.cyclic_orders
            .iter()
            .map(|d| d.to_u64().expect("cyclic order fits in u64"))
            .collect()
    }

    /// All elements as coefficient tuples, lexicographic with the last index fastest.
    pub fn elements(&self) -> Result<impl Iterator<Item = Vec<u64>>> {
        let total = self.enumerable_order()?;
        let orders = self.orders_u64();
        Ok((0..total).map(move |mut idx| {
            let mut t = vec![0u64; orders.len()];
            for (slot, &d) in t.iter_mut().zip(&orders).rev() {
                *slot = idx % d;
                idx /= d;
            }
            t
        }))
    }

    /// Canonical coefficient tuple of the class of `x ∈ ℤ^ρ`.
    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ambient_dim, "dimension mismatch");
        self.coordinate_rows
            .iter()
            .zip(&self.cyclic_orders)
            .map(|(row, d)| {
                let v: BigInt = row.iter().zip(x).map(|(a, b)| a * b).sum();
                ((v % d) + d) % d
            })
            .collect()
    }

    /// `Σ aᵢ gᵢ`
    pub fn lift(&self, coeffs: &[u64]) -> Vec<BigInt> {
        let mut x = vec![BigInt::zero(); self.ambient_dim];
        for (a, g) in coeffs.iter().zip(&self.generator_reps) {
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi += gi * BigInt::from(*a);
            }
        }
        x
    }
}

/// Cyclic decomposition of the cokernel of a nondegenerate matrix via its Smith form.
pub fn cokernel(l_reg: &IntSymMatrix) -> Result<CokernelGroup> {
    let rho = l_reg.dim();
    if rho == 0 {
        return Ok(CokernelGroup::trivial(0));
    }
    let snf = smith_normal_form(l_reg.as_matrix());
    let diag = snf.diagonal();
    if diag.iter().any(Zero::is_zero) {
        return Err(Error::DegenerateMatrix);
    }
    let mut group = CokernelGroup::trivial(rho);
    for (i, d) in diag.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        group.cyclic_orders.push(d.abs());
        group.generator_reps.push(snf.u_inv().column(i));
        group.coordinate_rows.push(snf.u.row(i).to_vec());
    }
    Ok(group)
}
