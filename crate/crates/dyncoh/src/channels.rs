//! CPTP maps stored as Choi operators.
//!
//! Convention: the Choi operator of a map `Λ: in → out` is the unnormalized
//! `J = Σ_{ij} |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` on the composite space `in ⊗ out` (input
//! factor first, row-major indices), so `tr J = dim_in`. A map is CPTP iff
//! `J ⪰ 0` and `tr_out J = 1_in`.

use crate::density::{DensityMatrix, StateError};
use crate::matrix::{
    eig_hermitian, haar_unitary, partial_trace_matrix, ComplexMatrix, ComplexVector, MatrixError,
    C64,
};
use crate::tolerances::Tolerances;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Frobenius tolerance for the linear Choi identities deciding MIO/DIO
/// membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Eigenvalue cutoff below which Choi eigenvectors are dropped during Kraus
/// extraction.
pub const KRAUS_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid dimensions: {0}")]
    BadDims(String),

    #[error("Choi operator is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("Choi operator has eigenvalue {min_eig:.3e} below -{tol:.3e}; map is not completely positive")]
    NotPositive { min_eig: f64, tol: f64 },

    #[error("map is not trace preserving: ‖tr_out J − 1‖_F = {residual:.3e} exceeds {tol:.3e}")]
    NotTracePreserving { residual: f64, tol: f64 },

    #[error("Kraus completeness violated: ‖ΣK†K − 1‖_F = {residual:.3e} exceeds {tol:.3e}")]
    KrausIncomplete { residual: f64, tol: f64 },

    #[error("POVM elements do not sum to identity: residual {residual:.3e}")]
    PovmIncomplete { residual: f64 },

    #[error("POVM element {index} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    PovmNotPositive { index: usize, min_eig: f64 },

    #[error("instrument branches do not sum to a trace-preserving map: residual {residual:.3e}")]
    BranchesNotTracePreserving { residual: f64 },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("mixing weight {0} outside [0, 1]")]
    BadMixWeight(f64),

    #[error(transparent)]
    Matrix(#[from] MatrixError),

    #[error(transparent)]
    State(#[from] StateError),
}

/// A CPTP map with explicit input/output dimensions, stored as its Choi
/// operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
}

impl QuantumChannel {
    /// Builds a channel from a Choi operator, validating the CPTP invariants
    /// against the default tolerances.
    pub fn from_choi(
        dim_in: usize,
        dim_out: usize,
        choi: ComplexMatrix,
    ) -> Result<Self, ChannelError> {
        Self::from_choi_with(dim_in, dim_out, choi, &Tolerances::default())
    }

    pub fn from_choi_with(
        dim_in: usize,
        dim_out: usize,
        choi: ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<Self, ChannelError> {
        if dim_in == 0 || dim_out == 0 {
            return Err(ChannelError::BadDims("dimensions must be ≥ 1".into()));
        }
        let expected = dim_in * dim_out;
        if !choi.is_square() || choi.rows() != expected {
            return Err(ChannelError::BadDims(format!(
                "Choi must be {expected}x{expected} for dims {dim_in}→{dim_out}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        let residual = choi.hermiticity_residual();
        if residual > tol.herm {
            return Err(ChannelError::NotHermitian {
                residual,
                tol: tol.herm,
            });
        }
        let (eigs, _) = eig_hermitian(&choi, tol.herm)?;
        if let Some(&min_eig) = eigs.last() {
            if min_eig < -tol.psd {
                return Err(ChannelError::NotPositive {
                    min_eig,
                    tol: tol.psd,
                });
            }
        }
        let marginal = partial_trace_matrix(&choi, &[dim_in, dim_out], &[0])?;
        let tp_residual = marginal.distance(&ComplexMatrix::identity(dim_in));
        if tp_residual > tol.trace {
            return Err(ChannelError::NotTracePreserving {
                residual: tp_residual,
                tol: tol.trace,
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            choi,
        })
    }

    /// Builds from a Choi operator without validation. For internal
    /// constructions that are CPTP by construction.
    fn from_choi_unchecked(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Self {
        Self {
            dim_in,
            dim_out,
            choi,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Frobenius distance between Choi operators (dimensions must match).
    pub fn choi_distance(&self, other: &QuantumChannel) -> f64 {
        assert_eq!(
            (self.dim_in, self.dim_out),
            (other.dim_in, other.dim_out),
            "choi_distance dimension mismatch"
        );
        self.choi.distance(&other.choi)
    }

    /// CPTP residuals `(hermiticity, min eigenvalue, trace preservation)`,
    /// for diagnostics.
    pub fn cptp_residuals(&self) -> (f64, f64, f64) {
        let herm = self.choi.hermiticity_residual();
        let min_eig = eig_hermitian(&self.choi.hermitized(), f64::INFINITY)
            .map(|(e, _)| e.last().copied().unwrap_or(0.0))
            .unwrap_or(f64::NAN);
        let marginal = partial_trace_matrix(&self.choi, &[self.dim_in, self.dim_out], &[0])
            .expect("choi shape is consistent");
        let tp = marginal.distance(&ComplexMatrix::identity(self.dim_in));
        (herm, min_eig, tp)
    }

    /// The identity channel on `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut choi = ComplexMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                choi[(i * dim + i, j * dim + j)] = C64::new(1.0, 0.0);
            }
        }
        Self::from_choi_unchecked(dim, dim, choi)
    }

    /// Channel from a Kraus set: `J = Σ_n (1 ⊗ K_n)|Ω⟩⟨Ω|(1 ⊗ K_n)†`.
    pub fn from_kraus(kraus: &KrausSet) -> Result<Self, ChannelError> {
        kraus.validate(&Tolerances::default())?;
        let dim_in = kraus.dim_in();
        let dim_out = kraus.dim_out();
        let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for k in kraus.operators() {
            for i in 0..dim_in {
                for a in 0..dim_out {
                    let left = k[(a, i)];
                    if left == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..dim_in {
                        for b in 0..dim_out {
                            choi[(i * dim_out + a, j * dim_out + b)] += left * k[(b, j)].conj();
                        }
                    }
                }
            }
        }
        Ok(Self::from_choi_unchecked(dim_in, dim_out, choi))
    }

    /// Unitary conjugation channel `ρ ↦ UρU†`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self, ChannelError> {
        if !u.is_square() {
            return Err(ChannelError::BadDims("unitary must be square".into()));
        }
        let kraus = KrausSet::new(vec![u.clone()])?;
        Self::from_kraus(&kraus)
    }

    /// Qubit Hadamard channel.
    pub fn hadamard() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut u = ComplexMatrix::zeros(2, 2);
        u[(0, 0)] = h;
        u[(0, 1)] = h;
        u[(1, 0)] = h;
        u[(1, 1)] = -h;
        Self::unitary(&u).expect("Hadamard is unitary")
    }

    /// Total dephasing `Δ` in the computational product basis of `dims`.
    pub fn dephasing(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        assert!(d >= 1, "dephasing needs a nonempty dimension list");
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            choi[(i * d + i, i * d + i)] = C64::new(1.0, 0.0);
        }
        Self::from_choi_unchecked(d, d, choi)
    }

    /// Generalized CNOT on two `d`-dimensional factors:
    /// `U = Σ_{ij} |i⟩⟨i| ⊗ |mod(i+j,d)⟩⟨j|`.
    pub fn cnot(d: usize) -> Result<Self, ChannelError> {
        if d < 2 {
            return Err(ChannelError::BadDims(format!(
                "generalized CNOT needs d ≥ 2, got {d}"
            )));
        }
        let dd = d * d;
        let mut u = ComplexMatrix::zeros(dd, dd);
        for i in 0..d {
            for j in 0..d {
                u[(i * d + (i + j) % d, i * d + j)] = C64::new(1.0, 0.0);
            }
        }
        Self::unitary(&u)
    }

    /// Replacement channel with constant output `τ`: `ρ ↦ τ · tr ρ`.
    pub fn replacement(tau: &DensityMatrix, dim_in: usize) -> Self {
        let choi = crate::matrix::kron(&ComplexMatrix::identity(dim_in), tau.matrix());
        Self::from_choi_unchecked(dim_in, tau.dim(), choi)
    }

    /// Image `Λ(|i⟩⟨j|)` of a matrix unit, read off the Choi blocks.
    pub fn matrix_unit_image(&self, i: usize, j: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in 0..self.dim_out {
            for b in 0..self.dim_out {
                out[(a, b)] = self.choi[(i * self.dim_out + a, j * self.dim_out + b)];
            }
        }
        out
    }

    /// Image of the basis state `|i⟩⟨i|`.
    pub fn basis_image(&self, i: usize) -> ComplexMatrix {
        self.matrix_unit_image(i, i)
    }

    /// Linear action on an arbitrary square matrix (no state validation).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(m.rows(), self.dim_in, "apply_matrix dimension mismatch");
        assert!(m.is_square());
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let w = m[(i, j)];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for a in 0..self.dim_out {
                    for b in 0..self.dim_out {
                        out[(a, b)] += w * self.choi[(i * self.dim_out + a, j * self.dim_out + b)];
                    }
                }
            }
        }
        out
    }

    /// Applies the channel to a state. Output carried on a single factor of
    /// dimension `dim_out`; use [`DensityMatrix::with_dims`] to reinstate a
    /// factor structure.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
        if rho.dim() != self.dim_in {
            return Err(ChannelError::BadDims(format!(
                "channel expects input dimension {}, state has {}",
                self.dim_in,
                rho.dim()
            )));
        }
        let out = self.apply_matrix(rho.matrix()).hermitized();
        Ok(DensityMatrix::new(vec![self.dim_out], out)?)
    }

    /// Sequential composition `after ∘ before`.
    pub fn compose(after: &QuantumChannel, before: &QuantumChannel) -> Result<Self, ChannelError> {
        if after.dim_in != before.dim_out {
            return Err(ChannelError::BadDims(format!(
                "compose mismatch: inner output {} vs outer input {}",
                before.dim_out, after.dim_in
            )));
        }
        let dim_in = before.dim_in;
        let dim_out = after.dim_out;
        let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let block = after.apply_matrix(&before.matrix_unit_image(i, j));
                for a in 0..dim_out {
                    for b in 0..dim_out {
                        choi[(i * dim_out + a, j * dim_out + b)] = block[(a, b)];
                    }
                }
            }
        }
        Ok(Self::from_choi_unchecked(dim_in, dim_out, choi))
    }

    /// Parallel composition `Θ_A ⊗ Θ_B` on the composite row-major index
    /// (A before B on both input and output).
    pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> Self {
        let dim_in = a.dim_in * b.dim_in;
        let dim_out = a.dim_out * b.dim_out;
        let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
        for ia in 0..a.dim_in {
            for ja in 0..a.dim_in {
                for oa in 0..a.dim_out {
                    for pa in 0..a.dim_out {
                        let fa = a.choi[(ia * a.dim_out + oa, ja * a.dim_out + pa)];
                        if fa == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for ib in 0..b.dim_in {
                            for jb in 0..b.dim_in {
                                for ob in 0..b.dim_out {
                                    for pb in 0..b.dim_out {
                                        let fb = b.choi[(ib * b.dim_out + ob, jb * b.dim_out + pb)];
                                        if fb == C64::new(0.0, 0.0) {
                                            continue;
                                        }
                                        let row =
                                            (ia * b.dim_in + ib) * dim_out + (oa * b.dim_out + ob);
                                        let col =
                                            (ja * b.dim_in + jb) * dim_out + (pa * b.dim_out + pb);
                                        choi[(row, col)] = fa * fb;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Self::from_choi_unchecked(dim_in, dim_out, choi)
    }

    /// Convex mixture `t·Θ₁ + (1−t)·Θ₂`.
    pub fn mix(a: &QuantumChannel, b: &QuantumChannel, t: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(ChannelError::BadMixWeight(t));
        }
        if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out) {
            return Err(ChannelError::BadDims(
                "mixture requires identical dimensions".into(),
            ));
        }
        let choi = a
            .choi
            .scale(C64::new(t, 0.0))
            .add(&b.choi.scale(C64::new(1.0 - t, 0.0)));
        Ok(Self::from_choi_unchecked(a.dim_in, a.dim_out, choi))
    }

    /// Canonical Kraus operators from the Choi eigendecomposition.
    pub fn extract_kraus(&self) -> KrausSet {
        let (eigs, vecs) = eig_hermitian(&self.choi.hermitized(), f64::INFINITY)
            .expect("hermitized Choi diagonalizes");
        let mut ops = Vec::new();
        for (n, &lambda) in eigs.iter().enumerate() {
            if lambda <= KRAUS_CUTOFF {
                continue;
            }
            let scale = lambda.sqrt();
            let mut k = ComplexMatrix::zeros(self.dim_out, self.dim_in);
            for i in 0..self.dim_in {
                for a in 0..self.dim_out {
                    k[(a, i)] = vecs[(i * self.dim_out + a, n)] * scale;
                }
            }
            ops.push(k);
        }
        KrausSet { operators: ops }
    }

    /// MIO membership: `Δ_out ∘ Θ ∘ Δ_in = Θ ∘ Δ_in` within [`MEMBERSHIP_TOL`]
    /// (Frobenius distance of Choi operators).
    pub fn is_mio(&self) -> bool {
        let delta_in = QuantumChannel::dephasing(&[self.dim_in]);
        let delta_out = QuantumChannel::dephasing(&[self.dim_out]);
        let theta_delta =
            QuantumChannel::compose(self, &delta_in).expect("dims match by construction");
        let dephased =
            QuantumChannel::compose(&delta_out, &theta_delta).expect("dims match by construction");
        theta_delta.choi_distance(&dephased) <= MEMBERSHIP_TOL
    }

    /// DIO membership (dephasing covariance): `Δ_out ∘ Θ = Θ ∘ Δ_in` within
    /// [`MEMBERSHIP_TOL`].
    pub fn is_dio(&self) -> bool {
        let delta_in = QuantumChannel::dephasing(&[self.dim_in]);
        let delta_out = QuantumChannel::dephasing(&[self.dim_out]);
        let left = QuantumChannel::compose(&delta_out, self).expect("dims match by construction");
        let right = QuantumChannel::compose(self, &delta_in).expect("dims match by construction");
        left.choi_distance(&right) <= MEMBERSHIP_TOL
    }
}

/// A set of Kraus operators `{K_n}` with `Σ K†K = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let set = Self { operators };
        set.validate(&Tolerances::default())?;
        Ok(set)
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim_in(&self) -> usize {
        self.operators[0].cols()
    }

    pub fn dim_out(&self) -> usize {
        self.operators[0].rows()
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<(), ChannelError> {
        if self.operators.is_empty() {
            return Err(ChannelError::Empty("Kraus set"));
        }
        let (rows, cols) = (self.operators[0].rows(), self.operators[0].cols());
        for k in &self.operators {
            if (k.rows(), k.cols()) != (rows, cols) {
                return Err(ChannelError::BadDims(
                    "Kraus operators must share one shape".into(),
                ));
            }
        }
        let mut sum = ComplexMatrix::zeros(cols, cols);
        for k in &self.operators {
            sum = sum.add(&k.dagger().matmul(k));
        }
        let residual = sum.distance(&ComplexMatrix::identity(cols));
        if residual > tol.trace {
            return Err(ChannelError::KrausIncomplete {
                residual,
                tol: tol.trace,
            });
        }
        Ok(())
    }

    /// True when every operator has at most one nonzero entry per row and
    /// per column (entries below `tol` count as zero). This is the
    /// strictly-incoherent Kraus structure.
    pub fn is_strictly_incoherent_form(&self, tol: f64) -> bool {
        self.operators.iter().all(|k| {
            for i in 0..k.rows() {
                let nonzero = (0..k.cols()).filter(|&j| k[(i, j)].norm() > tol).count();
                if nonzero > 1 {
                    return false;
                }
            }
            for j in 0..k.cols() {
                let nonzero = (0..k.rows()).filter(|&i| k[(i, j)].norm() > tol).count();
                if nonzero > 1 {
                    return false;
                }
            }
            true
        })
    }
}

/// Flag register convention for destructive-measurement embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagBasis {
    /// Outcomes recorded as `|n⟩` on a single flag register.
    Local,
    /// Outcomes recorded as `|n⟩⊗|n⟩` on a two-party flag register.
    Product,
}

/// A POVM plus the flag convention used when embedding it as a channel.
#[derive(Debug, Clone)]
pub struct MeasurementSpec {
    povm: Vec<ComplexMatrix>,
    flag_basis: FlagBasis,
}

impl MeasurementSpec {
    pub fn new(povm: Vec<ComplexMatrix>, flag_basis: FlagBasis) -> Result<Self, ChannelError> {
        if povm.is_empty() {
            return Err(ChannelError::Empty("POVM"));
        }
        let dim = povm[0].rows();
        let tol = Tolerances::default();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (index, element) in povm.iter().enumerate() {
            if !element.is_square() || element.rows() != dim {
                return Err(ChannelError::BadDims(
                    "POVM elements must share one square shape".into(),
                ));
            }
            if element.hermiticity_residual() > tol.herm {
                return Err(ChannelError::NotHermitian {
                    residual: element.hermiticity_residual(),
                    tol: tol.herm,
                });
            }
            let (eigs, _) = eig_hermitian(&element.hermitized(), tol.herm)?;
            if let Some(&min_eig) = eigs.last() {
                if min_eig < -tol.psd {
                    return Err(ChannelError::PovmNotPositive { index, min_eig });
                }
            }
            sum = sum.add(element);
        }
        let residual = sum.distance(&ComplexMatrix::identity(dim));
        if residual > tol.trace {
            return Err(ChannelError::PovmIncomplete { residual });
        }
        Ok(Self { povm, flag_basis })
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    pub fn flag_basis(&self) -> FlagBasis {
        self.flag_basis
    }

    pub fn n_outcomes(&self) -> usize {
        self.povm.len()
    }

    pub fn dim(&self) -> usize {
        self.povm[0].rows()
    }
}

/// Embeds a destructive measurement as the CPTP map
/// `ρ ↦ Σ_n tr(Π_n ρ) |x_n⟩⟨x_n|`, with `|x_n⟩` set by the flag basis.
/// The Choi operator is `Σ_n Π_nᵀ ⊗ |x_n⟩⟨x_n|`.
pub fn embed_measurement(spec: &MeasurementSpec) -> QuantumChannel {
    let dim_in = spec.dim();
    let n = spec.n_outcomes();
    let dim_out = match spec.flag_basis() {
        FlagBasis::Local => n,
        FlagBasis::Product => n * n,
    };
    let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
    for (outcome, element) in spec.povm().iter().enumerate() {
        let flag = match spec.flag_basis() {
            FlagBasis::Local => outcome,
            FlagBasis::Product => outcome * n + outcome,
        };
        for i in 0..dim_in {
            for j in 0..dim_in {
                choi[(i * dim_out + flag, j * dim_out + flag)] += element[(j, i)];
            }
        }
    }
    QuantumChannel {
        dim_in,
        dim_out,
        choi,
    }
}

/// A quantum instrument: completely positive branches `Λ_n` (as Choi
/// operators on `in ⊗ out`) summing to a trace-preserving map.
#[derive(Debug, Clone)]
pub struct InstrumentSpec {
    dim_in: usize,
    dim_out: usize,
    branches: Vec<ComplexMatrix>,
}

impl InstrumentSpec {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        branches: Vec<ComplexMatrix>,
    ) -> Result<Self, ChannelError> {
        if branches.is_empty() {
            return Err(ChannelError::Empty("instrument"));
        }
        let expected = dim_in * dim_out;
        let tol = Tolerances::default();
        let mut total = ComplexMatrix::zeros(expected, expected);
        for branch in &branches {
            if !branch.is_square() || branch.rows() != expected {
                return Err(ChannelError::BadDims(format!(
                    "branch Choi must be {expected}x{expected}"
                )));
            }
            if branch.hermiticity_residual() > tol.herm {
                return Err(ChannelError::NotHermitian {
                    residual: branch.hermiticity_residual(),
                    tol: tol.herm,
                });
            }
            let (eigs, _) = eig_hermitian(&branch.hermitized(), tol.herm)?;
            if let Some(&min_eig) = eigs.last() {
                if min_eig < -tol.psd {
                    return Err(ChannelError::NotPositive {
                        min_eig,
                        tol: tol.psd,
                    });
                }
            }
            total = total.add(branch);
        }
        let marginal = partial_trace_matrix(&total, &[dim_in, dim_out], &[0])?;
        let residual = marginal.distance(&ComplexMatrix::identity(dim_in));
        if residual > tol.trace {
            return Err(ChannelError::BranchesNotTracePreserving { residual });
        }
        Ok(Self {
            dim_in,
            dim_out,
            branches,
        })
    }

    /// Instrument made from whole channels as branches, weighted by `probs`.
    pub fn from_channels(channels: &[QuantumChannel], probs: &[f64]) -> Result<Self, ChannelError> {
        if channels.is_empty() || channels.len() != probs.len() {
            return Err(ChannelError::Empty("instrument"));
        }
        let dim_in = channels[0].dim_in();
        let dim_out = channels[0].dim_out();
        let branches = channels
            .iter()
            .zip(probs)
            .map(|(ch, &p)| ch.choi().scale(C64::new(p, 0.0)))
            .collect();
        Self::new(dim_in, dim_out, branches)
    }

    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn branches(&self) -> &[ComplexMatrix] {
        &self.branches
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }
}

/// Embeds an instrument as the flagged CPTP map
/// `ρ ↦ Σ_n Λ_n(ρ) ⊗ |n⟩⟨n|`; tracing out the flag register recovers the
/// sum of the branches.
pub fn embed_instrument(spec: &InstrumentSpec) -> QuantumChannel {
    let n = spec.n_branches();
    let dim_in = spec.dim_in;
    let d_sys = spec.dim_out;
    let dim_out = d_sys * n;
    let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
    for (flag, branch) in spec.branches.iter().enumerate() {
        for i in 0..dim_in {
            for j in 0..dim_in {
                for a in 0..d_sys {
                    for b in 0..d_sys {
                        let row = i * dim_out + (a * n + flag);
                        let col = j * dim_out + (b * n + flag);
                        choi[(row, col)] = branch[(i * d_sys + a, j * d_sys + b)];
                    }
                }
            }
        }
    }
    QuantumChannel {
        dim_in,
        dim_out,
        choi,
    }
}

/// Haar-random CPTP map via a Stinespring dilation with environment
/// dimension `env_dim`. Requires `dim_out * env_dim ≥ dim_in`.
pub fn random_channel(
    dim_in: usize,
    dim_out: usize,
    env_dim: usize,
    seed: u64,
) -> Result<QuantumChannel, ChannelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_channel_with(dim_in, dim_out, env_dim, &mut rng)
}

pub fn random_channel_with<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    env_dim: usize,
    rng: &mut R,
) -> Result<QuantumChannel, ChannelError> {
    if dim_in == 0 || dim_out == 0 || env_dim == 0 {
        return Err(ChannelError::BadDims("dimensions must be ≥ 1".into()));
    }
    let dilation = dim_out * env_dim;
    if dilation < dim_in {
        return Err(ChannelError::BadDims(format!(
            "dilation {dilation} smaller than input {dim_in}"
        )));
    }
    let u = haar_unitary(dilation, rng);
    // Isometry = first dim_in columns; Kraus operators slice the environment.
    let mut ops = Vec::with_capacity(env_dim);
    for e in 0..env_dim {
        let mut k = ComplexMatrix::zeros(dim_out, dim_in);
        for a in 0..dim_out {
            for i in 0..dim_in {
                k[(a, i)] = u[(a * env_dim + e, i)];
            }
        }
        ops.push(k);
    }
    QuantumChannel::from_kraus(&KrausSet::new(ops)?)
}

/// Haar-random unitary conjugation channel.
pub fn random_unitary_channel(dim: usize, seed: u64) -> QuantumChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_channel_with(dim, &mut rng)
}

pub fn random_unitary_channel_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumChannel {
    QuantumChannel::unitary(&haar_unitary(dim, rng)).expect("Haar sample is unitary")
}

/// Random permutation-phase unitary `U = Σ_j e^{iθ_j} |π(j)⟩⟨j|`; these are
/// strictly incoherent, hence inside every free set down to SIO.
pub fn random_permutation_phase_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, &target) in perm.iter().enumerate() {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        u[(target, j)] = C64::new(theta.cos(), theta.sin());
    }
    u
}

/// Seeded sample from the MIO-sample family: a convex combination of
/// permutation-phase unitaries, fully classical maps `Δ∘Θ₀∘Δ`, and
/// measure-and-prepare-diagonal maps. All components are strictly
/// incoherent or manifestly diagonal-preserving, so the mixture always
/// passes [`QuantumChannel::is_mio`].
pub fn random_mio_channel(dim: usize, seed: u64) -> QuantumChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_mio_channel_with(dim, &mut rng)
}

pub fn random_mio_channel_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> QuantumChannel {
    let n_components = rng.random_range(1..=3usize);
    let mut weights: Vec<f64> = (0..n_components)
        .map(|_| -rng.random::<f64>().max(1e-12).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }

    let delta = QuantumChannel::dephasing(&[dim]);
    let mut choi = ComplexMatrix::zeros(dim * dim, dim * dim);
    for &w in &weights {
        let component = match rng.random_range(0..3u8) {
            0 => {
                let u = random_permutation_phase_unitary(dim, rng);
                QuantumChannel::unitary(&u).expect("permutation-phase is unitary")
            }
            1 => {
                let theta = random_channel_with(dim, dim, dim, rng).expect("dilation covers input");
                let inner = QuantumChannel::compose(&theta, &delta).expect("square dims");
                QuantumChannel::compose(&delta, &inner).expect("square dims")
            }
            _ => {
                // Measure in the incoherent basis, prepare a random diagonal
                // state per outcome.
                let mut j = ComplexMatrix::zeros(dim * dim, dim * dim);
                for i in 0..dim {
                    let mut q: Vec<f64> = (0..dim)
                        .map(|_| -rng.random::<f64>().max(1e-12).ln())
                        .collect();
                    let z: f64 = q.iter().sum();
                    for x in &mut q {
                        *x /= z;
                    }
                    for (a, &qa) in q.iter().enumerate() {
                        j[(i * dim + a, i * dim + a)] = C64::new(qa, 0.0);
                    }
                }
                QuantumChannel {
                    dim_in: dim,
                    dim_out: dim,
                    choi: j,
                }
            }
        };
        choi = choi.add(&component.choi().scale(C64::new(w, 0.0)));
    }
    QuantumChannel {
        dim_in: dim,
        dim_out: dim,
        choi,
    }
}

/// Embedding `|i⟩⟨i| ↦ ComplexVector` of the computational basis on `dim`.
pub fn basis_density(dim: usize, index: usize) -> DensityMatrix {
    DensityMatrix::from_pure(vec![dim], &ComplexVector::basis_state(dim, index))
        .expect("basis states are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::von_neumann_entropy;
    use crate::matrix::ginibre;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let g = ginibre(dim, dim, rng);
        let mut m = g.matmul(&g.dagger());
        let tr = m.trace().re;
        m = m.scale(c(1.0 / tr, 0.0));
        DensityMatrix::new(vec![dim], m).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(vec![2], &ComplexVector::from_real(&[s, s])).unwrap()
    }

    #[test]
    fn identity_kraus_gives_omega_choi() {
        let kraus = KrausSet::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let ch = QuantumChannel::from_kraus(&kraus).unwrap();
        assert_eq!(ch.choi().trace().re, 2.0);
        assert!(ch.choi_distance(&QuantumChannel::identity(2)) < 1e-14);
    }

    #[test]
    fn projector_kraus_is_dephasing() {
        let p0 = ComplexVector::basis_state(2, 0).projector();
        let p1 = ComplexVector::basis_state(2, 1).projector();
        let kraus = KrausSet::new(vec![p0, p1]).unwrap();
        let ch = QuantumChannel::from_kraus(&kraus).unwrap();
        assert!(ch.choi_distance(&QuantumChannel::dephasing(&[2])) < 1e-14);
    }

    #[test]
    fn kraus_completeness_enforced() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(matches!(
            KrausSet::new(vec![half]),
            Err(ChannelError::KrausIncomplete { .. })
        ));
    }

    #[test]
    fn random_isometry_channel_matches_kraus_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let ch = random_channel_with(2, 3, 2, &mut rng).unwrap();
        let kraus = ch.extract_kraus();
        let rho = random_density(2, &mut rng);
        let via_choi = ch.apply(&rho).unwrap();
        let mut via_kraus = ComplexMatrix::zeros(3, 3);
        for k in kraus.operators() {
            via_kraus = via_kraus.add(&k.matmul(rho.matrix()).matmul(&k.dagger()));
        }
        assert!(via_choi.matrix().distance(&via_kraus) <= 1e-12);
    }

    #[test]
    fn identity_channel_fixes_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(3, &mut rng);
        let id = QuantumChannel::identity(3);
        let out = id.apply(&rho).unwrap();
        assert!(out.matrix().distance(rho.matrix()) < 1e-13);
    }

    #[test]
    fn dephasing_kills_plus_coherences() {
        let delta = QuantumChannel::dephasing(&[2]);
        let out = delta.apply(&plus_state()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert!(out.matrix().distance(mixed.matrix()) < 1e-14);
    }

    #[test]
    fn hadamard_matches_unitary_conjugation_oracle() {
        let h = QuantumChannel::hadamard();
        let zero = basis_density(2, 0);
        let out = h.apply(&zero).unwrap();
        assert!(out.matrix().distance(plus_state().matrix()) < 1e-14);
    }

    #[test]
    fn dephasing_is_idempotent_and_fixes_diagonals() {
        let delta = QuantumChannel::dephasing(&[2]);
        let composed = QuantumChannel::compose(&delta, &delta).unwrap();
        assert!(composed.choi_distance(&delta) < 1e-14);

        let diag = DensityMatrix::from_probabilities(vec![2], &[0.3, 0.7]).unwrap();
        let out = delta.apply(&diag).unwrap();
        assert!(out.matrix().distance(diag.matrix()) < 1e-14);
    }

    #[test]
    fn dephasing_bell_state_gives_classical_mixture() {
        let delta = QuantumChannel::dephasing(&[2, 2]);
        let bell = DensityMatrix::maximally_entangled(2);
        let out = delta.apply(&bell).unwrap();
        // Diagonal-extraction oracle.
        let expected = bell.matrix().diagonal_part();
        assert!(out.matrix().distance(&expected) < 1e-14);
        let probs = out.matrix().real_diagonal();
        assert!((probs[0] - 0.5).abs() < 1e-14 && (probs[3] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id2 = QuantumChannel::identity(2);
        let id = QuantumChannel::tensor(&id2, &id2);
        assert!(id.choi_distance(&QuantumChannel::identity(4)) < 1e-14);
    }

    #[test]
    fn compose_matches_sequential_apply_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let first = random_channel_with(2, 2, 2, &mut rng).unwrap();
        let second = random_channel_with(2, 2, 2, &mut rng).unwrap();
        let composed = QuantumChannel::compose(&second, &first).unwrap();
        for _ in 0..50 {
            let rho = random_density(2, &mut rng);
            let sequential = second.apply(&first.apply(&rho).unwrap()).unwrap();
            let direct = composed.apply(&rho).unwrap();
            assert!(direct.matrix().distance(sequential.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn cnot_acts_by_modular_addition() {
        let cnot = QuantumChannel::cnot(2).unwrap();
        let in_state = basis_density(4, 2); // |10⟩
        let out = cnot.apply(&in_state).unwrap();
        let expected = basis_density(4, 3); // |11⟩
        assert!(out.matrix().distance(expected.matrix()) < 1e-14);

        let fixed = cnot.apply(&basis_density(4, 0)).unwrap(); // |00⟩ fixed
        assert!(fixed.matrix().distance(basis_density(4, 0).matrix()) < 1e-14);

        let qutrit = QuantumChannel::cnot(3).unwrap();
        let out3 = qutrit.apply(&basis_density(9, 2 * 3 + 1)).unwrap(); // |21⟩
        let expected3 = basis_density(9, 2 * 3); // |20⟩ since 2+1 mod 3 = 0
        assert!(out3.matrix().distance(expected3.matrix()) < 1e-14);

        assert!(QuantumChannel::cnot(1).is_err());
    }

    #[test]
    fn cnot_choi_is_rank_one() {
        let cnot = QuantumChannel::cnot(2).unwrap();
        let (eigs, _) = eig_hermitian(cnot.choi(), 1e-9).unwrap();
        assert!((eigs[0] - 4.0).abs() < 1e-12);
        for &e in &eigs[1..] {
            assert!(e.abs() <= 1e-10);
        }
    }

    #[test]
    fn replacement_channel_has_constant_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        let repl = QuantumChannel::replacement(&mixed, 2);
        let out = repl.apply(&basis_density(2, 0)).unwrap();
        assert!(out.matrix().distance(mixed.matrix()) < 1e-14);

        let plus = plus_state();
        let repl_plus = QuantumChannel::replacement(&plus, 2);
        let rho = random_density(2, &mut rng);
        let out2 = repl_plus.apply(&rho).unwrap();
        assert!(out2.matrix().distance(plus.matrix()) < 1e-13);
    }

    #[test]
    fn replacement_choi_matches_from_definition_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tau = random_density(3, &mut rng);
        let repl = QuantumChannel::replacement(&tau, 2);
        // From-definition: blocks Λ(|i⟩⟨j|) = δ_ij τ.
        let mut expected = ComplexMatrix::zeros(6, 6);
        for i in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    expected[(i * 3 + a, i * 3 + b)] = tau.matrix()[(a, b)];
                }
            }
        }
        assert!(repl.choi().distance(&expected) < 1e-14);
        QuantumChannel::from_choi(2, 3, repl.choi().clone()).unwrap();
    }

    #[test]
    fn computational_povm_embeds_to_diagonal_flags() {
        let p0 = ComplexVector::basis_state(2, 0).projector();
        let p1 = ComplexVector::basis_state(2, 1).projector();
        let spec = MeasurementSpec::new(vec![p0, p1], FlagBasis::Local).unwrap();
        let ch = embed_measurement(&spec);
        let rho = DensityMatrix::from_probabilities(vec![2], &[0.3, 0.7]).unwrap();
        let out = ch.apply(&rho).unwrap();
        let expected = DensityMatrix::from_probabilities(vec![2], &[0.3, 0.7]).unwrap();
        assert!(out.matrix().distance(expected.matrix()) < 1e-14);
    }

    #[test]
    fn plus_minus_povm_on_zero_state_is_uniform() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexVector::from_real(&[s, s]).projector();
        let minus = ComplexVector::from_real(&[s, -s]).projector();
        let spec = MeasurementSpec::new(vec![plus, minus], FlagBasis::Local).unwrap();
        let ch = embed_measurement(&spec);
        let out = ch.apply(&basis_density(2, 0)).unwrap();
        // Born-rule oracle: |⟨+|0⟩|² = |⟨−|0⟩|² = 1/2.
        let expected = DensityMatrix::maximally_mixed(vec![2]);
        assert!(out.matrix().distance(expected.matrix()) < 1e-14);
    }

    #[test]
    fn product_flag_embedding_supported_on_diagonal_pairs() {
        let p0 = ComplexVector::basis_state(2, 0).projector();
        let p1 = ComplexVector::basis_state(2, 1).projector();
        let spec = MeasurementSpec::new(vec![p0, p1], FlagBasis::Product).unwrap();
        let ch = embed_measurement(&spec);
        assert_eq!(ch.dim_out(), 4);
        let out = ch.apply(&plus_state()).unwrap();
        let diag = out.matrix().real_diagonal();
        assert!((diag[0] - 0.5).abs() < 1e-14, "weight on |00⟩");
        assert!((diag[3] - 0.5).abs() < 1e-14, "weight on |11⟩");
        assert!(diag[1].abs() < 1e-14 && diag[2].abs() < 1e-14);
        assert!(out.matrix().distance(&out.matrix().diagonal_part()) < 1e-14);
    }

    #[test]
    fn single_branch_instrument_appends_flag() {
        let theta = random_channel(2, 2, 2, 77).unwrap();
        let spec = InstrumentSpec::from_channels(std::slice::from_ref(&theta), &[1.0]).unwrap();
        let embedded = embed_instrument(&spec);
        assert_eq!(embedded.dim_out(), 2);
        let rho = basis_density(2, 0);
        let out = embedded.apply(&rho).unwrap();
        let expected = theta.apply(&rho).unwrap();
        assert!(out.matrix().distance(expected.matrix()) < 1e-12);
    }

    #[test]
    fn projective_instrument_is_block_diagonal() {
        // Branches Λ_n(ρ) = P_n ρ P_n for the computational projectors.
        let mut branches = Vec::new();
        for n in 0..2 {
            let mut j = ComplexMatrix::zeros(4, 4);
            j[(n * 2 + n, n * 2 + n)] = c(1.0, 0.0);
            branches.push(j);
        }
        let spec = InstrumentSpec::new(2, 2, branches).unwrap();
        let embedded = embed_instrument(&spec);
        let rho = plus_state();
        let out = embedded.apply(&rho).unwrap();
        let out = out.with_dims(vec![2, 2]).unwrap();
        // Blocks p_n |n⟩⟨n| ⊗ |n⟩⟨n| with p_0 = p_1 = 1/2.
        let diag = out.matrix().real_diagonal();
        assert!((diag[0] - 0.5).abs() < 1e-14); // |0⟩⊗flag0
        assert!((diag[3] - 0.5).abs() < 1e-14); // |1⟩⊗flag1
        assert!(diag[1].abs() < 1e-14 && diag[2].abs() < 1e-14);
    }

    #[test]
    fn instrument_flag_marginals_match_branch_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let a = random_channel_with(2, 2, 2, &mut rng).unwrap();
        let b = random_channel_with(2, 2, 2, &mut rng).unwrap();
        let spec = InstrumentSpec::from_channels(&[a, b], &[0.35, 0.65]).unwrap();
        let embedded = embed_instrument(&spec);
        for trial in 0..10 {
            let rho = random_density(2, &mut rng);
            let out = embedded.apply(&rho).unwrap().with_dims(vec![2, 2]).unwrap();
            let flags = out.partial_trace(&[1]).unwrap();
            for (n, branch) in spec.branches().iter().enumerate() {
                // tr Λ_n(ρ) from the branch Choi.
                let mut p = c(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        for a_idx in 0..2 {
                            p += rho.matrix()[(i, j)] * branch[(i * 2 + a_idx, j * 2 + a_idx)];
                        }
                    }
                }
                let got = flags.matrix()[(n, n)].re;
                assert!(
                    (got - p.re).abs() <= 1e-12,
                    "trial {trial} branch {n}: {got} vs {}",
                    p.re
                );
            }
        }
    }

    #[test]
    fn instrument_traced_flag_equals_branch_sum_as_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(321);
        let a = random_channel_with(2, 2, 2, &mut rng).unwrap();
        let b = random_channel_with(2, 2, 2, &mut rng).unwrap();
        let spec = InstrumentSpec::from_channels(&[a.clone(), b.clone()], &[0.5, 0.5]).unwrap();
        let embedded = embed_instrument(&spec);
        // Trace-out-flag channel: Kraus {1 ⊗ ⟨n|}.
        let mut ops = Vec::new();
        for n in 0..2 {
            let mut k = ComplexMatrix::zeros(2, 4);
            for a_idx in 0..2 {
                k[(a_idx, a_idx * 2 + n)] = c(1.0, 0.0);
            }
            ops.push(k);
        }
        let trace_flag = QuantumChannel::from_kraus(&KrausSet::new(ops).unwrap()).unwrap();
        let total = QuantumChannel::compose(&trace_flag, &embedded).unwrap();
        let mixed = QuantumChannel::mix(&a, &b, 0.5).unwrap();
        assert!(total.choi_distance(&mixed) < 1e-12);
    }

    #[test]
    fn dephasing_is_free_hadamard_is_not() {
        let delta = QuantumChannel::dephasing(&[2]);
        assert!(delta.is_mio());
        assert!(delta.is_dio());

        let h = QuantumChannel::hadamard();
        assert!(!h.is_mio());
    }

    #[test]
    fn permutation_unitary_is_mio_and_dio() {
        // Oracle: check the defining identities on basis inputs directly.
        let mut u = ComplexMatrix::zeros(3, 3);
        u[(1, 0)] = c(1.0, 0.0);
        u[(2, 1)] = c(1.0, 0.0);
        u[(0, 2)] = c(1.0, 0.0);
        let ch = QuantumChannel::unitary(&u).unwrap();
        for i in 0..3 {
            let img = ch.basis_image(i);
            assert!(img.distance(&img.diagonal_part()) < 1e-14);
        }
        assert!(ch.is_mio());
        assert!(ch.is_dio());
    }

    #[test]
    fn random_channel_is_seed_deterministic() {
        let a = random_channel(2, 2, 2, 9001).unwrap();
        let b = random_channel(2, 2, 2, 9001).unwrap();
        assert_eq!(a.choi().as_slice(), b.choi().as_slice());
        let c_ch = random_channel(2, 2, 2, 9002).unwrap();
        assert!(a.choi_distance(&c_ch) > 1e-6);
    }

    #[test]
    fn random_channels_pass_cptp_validation() {
        for seed in 0..100 {
            let ch = random_channel(2, 2, 2, seed).unwrap();
            QuantumChannel::from_choi(2, 2, ch.choi().clone())
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }

    #[test]
    fn random_mio_samples_are_mio() {
        for seed in 0..100 {
            let ch = random_mio_channel(2, seed);
            assert!(ch.is_mio(), "seed {seed} escaped MIO");
            QuantumChannel::from_choi(2, 2, ch.choi().clone()).unwrap();
        }
        let q = random_mio_channel(3, 5);
        assert!(q.is_mio());
    }

    #[test]
    fn choi_kraus_round_trip_preserves_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10 {
            let ch = random_channel_with(2, 2, 2, &mut rng).unwrap();
            let rebuilt = QuantumChannel::from_kraus(&ch.extract_kraus()).unwrap();
            let again = QuantumChannel::from_kraus(&rebuilt.extract_kraus()).unwrap();
            let rho = random_density(2, &mut rng);
            let d1 = ch.apply(&rho).unwrap();
            let d2 = again.apply(&rho).unwrap();
            assert!(d1.matrix().distance(d2.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn dephased_conjugation_has_strictly_incoherent_kraus_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let delta = QuantumChannel::dephasing(&[3]);
        for _ in 0..10 {
            let theta = random_channel_with(3, 3, 3, &mut rng).unwrap();
            let inner = QuantumChannel::compose(&theta, &delta).unwrap();
            let sandwich = QuantumChannel::compose(&delta, &inner).unwrap();
            let kraus = sandwich.extract_kraus();
            assert!(kraus.is_strictly_incoherent_form(1e-10));
        }
    }

    #[test]
    fn entropy_through_channel_pipeline_sane() {
        // Dephasing a pure coherent state raises entropy.
        let delta = QuantumChannel::dephasing(&[2]);
        let out = delta.apply(&plus_state()).unwrap();
        assert!((von_neumann_entropy(&out) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let ch = QuantumChannel::identity(2);
        let rho = DensityMatrix::maximally_mixed(vec![3]);
        assert!(matches!(ch.apply(&rho), Err(ChannelError::BadDims(_))));
        let other = QuantumChannel::identity(3);
        assert!(QuantumChannel::compose(&ch, &other).is_err());
    }

    #[test]
    fn from_choi_rejects_violations() {
        // Non-TP: all-zero Choi.
        let zero = ComplexMatrix::zeros(4, 4);
        assert!(QuantumChannel::from_choi(2, 2, zero).is_err());
        // Non-PSD: swap map has a negative Choi eigenvalue but is TP.
        let mut swap = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = c(1.0, 0.0);
            }
        }
        assert!(matches!(
            QuantumChannel::from_choi(2, 2, swap),
            Err(ChannelError::NotPositive { .. })
        ));
    }
}
