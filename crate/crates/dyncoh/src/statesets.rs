//! Free-state sets: incoherent states (diagonal in the computational product
//! basis) and separable states, the latter represented only through explicit
//! convex decompositions into product pure states. Deciding separability of
//! an arbitrary density matrix is NP-hard and nothing here needs it; every
//! optimization over the separable set walks over decompositions, which
//! double as membership certificates.

use crate::density::{shannon_entropy_bits, von_neumann_entropy, DensityMatrix, StateError};
use crate::matrix::{ginibre, ComplexMatrix, ComplexVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Simplex residual accepted for probability vectors in this module.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StateSetError {
    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),

    #[error("term {index} is not normalized: norm {norm}")]
    TermNotNormalized { index: usize, norm: f64 },

    #[error("term {index} has wrong local dimensions: ({got_a}, {got_b}) vs ({dim_a}, {dim_b})")]
    TermDims {
        index: usize,
        got_a: usize,
        got_b: usize,
        dim_a: usize,
        dim_b: usize,
    },

    #[error("decomposition has no terms")]
    Empty,

    #[error(transparent)]
    State(#[from] StateError),
}

fn check_simplex(probs: &[f64]) -> Result<(), StateSetError> {
    if probs.is_empty() {
        return Err(StateSetError::InvalidProbabilities("empty".into()));
    }
    if let Some(&p) = probs.iter().find(|&&p| !p.is_finite() || p < 0.0) {
        return Err(StateSetError::InvalidProbabilities(format!(
            "negative or non-finite entry {p}"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(StateSetError::InvalidProbabilities(format!(
            "sum {sum} deviates from 1 beyond {SIMPLEX_TOL:.0e}"
        )));
    }
    Ok(())
}

/// An incoherent state, i.e. a probability vector over the computational
/// product basis of `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentStateParam {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl IncoherentStateParam {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self, StateSetError> {
        let total: usize = dims.iter().product();
        if probs.len() != total {
            return Err(StateSetError::InvalidProbabilities(format!(
                "{} entries for total dimension {total}",
                probs.len()
            )));
        }
        check_simplex(&probs)?;
        Ok(Self { dims, probs })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_probabilities(self.dims.clone(), &self.probs)
            .expect("simplex vector forms a valid state")
    }
}

/// Certificate of separability: `Σ w_i |a_i⟩⟨a_i| ⊗ |b_i⟩⟨b_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    dim_a: usize,
    dim_b: usize,
    weights: Vec<f64>,
    terms: Vec<(ComplexVector, ComplexVector)>,
}

impl SeparableDecomposition {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        weights: Vec<f64>,
        terms: Vec<(ComplexVector, ComplexVector)>,
    ) -> Result<Self, StateSetError> {
        if terms.is_empty() || weights.len() != terms.len() {
            return Err(StateSetError::Empty);
        }
        check_simplex(&weights)?;
        for (index, (a, b)) in terms.iter().enumerate() {
            if a.dim() != dim_a || b.dim() != dim_b {
                return Err(StateSetError::TermDims {
                    index,
                    got_a: a.dim(),
                    got_b: b.dim(),
                    dim_a,
                    dim_b,
                });
            }
            for (side, v) in [("a", a), ("b", b)] {
                let norm = v.norm();
                if (norm - 1.0).abs() > SIMPLEX_TOL {
                    let _ = side;
                    return Err(StateSetError::TermNotNormalized { index, norm });
                }
            }
        }
        Ok(Self {
            dim_a,
            dim_b,
            weights,
            terms,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn terms(&self) -> &[(ComplexVector, ComplexVector)] {
        &self.terms
    }

    /// Assembles the decomposition into a bipartite density matrix on
    /// `[dim_a, dim_b]`.
    pub fn assemble(&self) -> DensityMatrix {
        let matrix = self.assemble_matrix();
        DensityMatrix::new(vec![self.dim_a, self.dim_b], matrix)
            .expect("convex combination of product projectors is a valid state")
    }

    /// Raw assembled operator without state validation; used inside
    /// optimization loops where weights may be mid-update.
    pub fn assemble_matrix(&self) -> ComplexMatrix {
        let d = self.dim_a * self.dim_b;
        let mut out = ComplexMatrix::zeros(d, d);
        for (w, (a, b)) in self.weights.iter().zip(&self.terms) {
            if *w == 0.0 {
                continue;
            }
            let psi = a.tensor(b);
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += C64::new(*w, 0.0) * psi[i] * psi[j].conj();
                }
            }
        }
        out
    }
}

/// Relative entropy of coherence `R_C(ρ) = S(Δρ) − S(ρ)` in bits; the closed
/// form of the minimal relative entropy from `ρ` to the incoherent set.
pub fn relative_entropy_of_coherence(rho: &DensityMatrix) -> f64 {
    let diagonal = rho.matrix().real_diagonal();
    let dephased_entropy = shannon_entropy_bits(&diagonal);
    (dephased_entropy - von_neumann_entropy(rho)).max(0.0)
}

/// Dirichlet(1,…,1) sample: uniform on the probability simplex.
pub fn dirichlet_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// Seeded uniform sample from the incoherent states on `dims`.
pub fn random_incoherent(dims: &[usize], seed: u64) -> IncoherentStateParam {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_incoherent_with(dims, &mut rng)
}

pub fn random_incoherent_with<R: Rng + ?Sized>(
    dims: &[usize],
    rng: &mut R,
) -> IncoherentStateParam {
    let total: usize = dims.iter().product();
    IncoherentStateParam::new(dims.to_vec(), dirichlet_uniform(total, rng))
        .expect("Dirichlet sample lies on the simplex")
}

/// Seeded Haar-random pure state vector on `dim`.
pub fn random_pure(dim: usize, seed: u64) -> ComplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_with(dim, &mut rng)
}

pub fn random_pure_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    ginibre(dim, 1, rng).column(0).normalized()
}

/// Seeded full-rank random mixed state (normalized Wishart `GG†/tr`).
pub fn random_mixed(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_mixed_with(dim, &mut rng)
}

pub fn random_mixed_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let mut m = g.matmul(&g.dagger());
    let tr = m.trace().re;
    m = m.scale(C64::new(1.0 / tr, 0.0));
    DensityMatrix::new(vec![dim], m.hermitized()).expect("Wishart sample is a state")
}

/// Random separable decomposition with `n_terms` Haar product terms and
/// Dirichlet weights.
pub fn random_separable_with<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    n_terms: usize,
    rng: &mut R,
) -> SeparableDecomposition {
    let weights = dirichlet_uniform(n_terms, rng);
    let terms = (0..n_terms)
        .map(|_| (random_pure_with(dim_a, rng), random_pure_with(dim_b, rng)))
        .collect();
    SeparableDecomposition::new(dim_a, dim_b, weights, terms).expect("sampled terms are normalized")
}
