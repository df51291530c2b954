use serde::{Deserialize, Serialize};

use crate::linalg::{spd_condition, DenseLu, DenseMatrix};
use crate::problems::ProblemModel;
use crate::spectral::Field;
use crate::{Error, Result};

/// Largest Gram condition number accepted by [`decompose_error`].
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

/// Infinitesimal generators of the declared symmetry groups at `u`.
pub fn symmetry_generators(problem: &dyn ProblemModel, u: &Field) -> Vec<Field> {
    problem.symmetries().iter().map(|g| g.generator(u)).collect()
}

/// `e = alpha u* + sum_k beta_k v_k + z`.
///
/// The coefficients come from the orthogonal projection onto
/// `span{u*, v_1, ...}`; near `u*` this differs from the oblique,
/// `S`-invariant splitting only at second order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorDecomposition {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub gram_condition: f64,
    #[serde(skip)]
    pub remainder: Option<Field>,
}

pub fn decompose_error(e: &Field, u_star: &Field, generators: &[Field]) -> Result<ErrorDecomposition> {
    let basis: Vec<&Field> = std::iter::once(u_star).chain(generators).collect();
    let n = basis.len();
    // Generators of real problems may come back complex (gauge); compare in
    // the error's own kind.
    for b in &basis {
        if !b.is_compatible(e) {
            return Err(Error::FieldMismatch(
                "error, state and generators must share domain and kind".into(),
            ));
        }
    }
    let gram = DenseMatrix::from_fn(n, n, |i, j| basis[i].dot(basis[j]));
    let cond = spd_condition(&gram);
    if !(cond <= GRAM_CONDITION_LIMIT) {
        return Err(Error::IllConditionedGram(cond));
    }
    let rhs: Vec<f64> = basis.iter().map(|b| b.dot(e)).collect();
    let coeffs = DenseLu::new(&gram)
        .map_err(|_| Error::IllConditionedGram(cond))?
        .solve(&rhs);
    let mut z = e.clone();
    for (c, b) in coeffs.iter().zip(&basis) {
        z.axpy(-c, b);
    }
    Ok(ErrorDecomposition {
        alpha: coeffs[0],
        beta: coeffs[1..].to_vec(),
        gram_condition: cond,
        remainder: Some(z),
    })
}
