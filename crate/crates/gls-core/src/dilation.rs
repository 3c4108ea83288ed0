//! Dilation operators f ↦ f(A·) for nonsingular A, tensor (block-wise)
//! dilations, and their predicted norms and bounds on the plain, weighted,
//! and sup-type spaces.

use thiserror::Error;

use crate::fundamental::{
    fundamental_agls, fundamental_gls, FundamentalError, MixedExponent, ProductSet, PsiMulti,
    SetBlock,
};
use crate::integrate::TestFunction;
use crate::linalg::{LinAlgError, Matrix};
use crate::psi::PsiFunction;
use crate::sup::SupConfig;

#[derive(Debug, Error)]
pub enum DilationError {
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Fundamental(#[from] FundamentalError),
}

/// Relative determinant threshold: |det A| must exceed this times the
/// Hadamard bound (product of row norms) for the construction to succeed.
const SINGULARITY_RTOL: f64 = 1e-12;

/// A nonsingular matrix with its determinant, inverse, and spectral norms
/// cached at construction. Construction fails for numerically singular
/// input; the operator f ↦ f(A·) is only defined for nonsingular A.
#[derive(Debug, Clone)]
pub struct Dilation {
    matrix: Matrix,
    inverse: Matrix,
    det: f64,
    op_norm: f64,
    inv_op_norm: f64,
}

impl Dilation {
    pub fn new(matrix: Matrix) -> Result<Self, DilationError> {
        let scale = matrix.hadamard_bound();
        let det = match matrix.determinant() {
            Ok(d) => d,
            Err(_) => 0.0,
        };
        if !(det.abs() > SINGULARITY_RTOL * scale.max(f64::MIN_POSITIVE)) {
            return Err(DilationError::Singular(format!(
                "determinant {det:.3e} below threshold {:.3e}; a dilation requires a nonsingular matrix",
                SINGULARITY_RTOL * scale
            )));
        }
        let inverse = matrix.inverse()?;
        let op_norm = matrix.spectral_norm();
        let inv_op_norm = inverse.spectral_norm();
        Ok(Self {
            matrix,
            inverse,
            det,
            op_norm,
            inv_op_norm,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DilationError> {
        Ok(Self::new(Matrix::from_rows(rows)?)?)
    }

    pub fn scalar(lambda: f64, d: usize) -> Result<Self, DilationError> {
        Self::new(Matrix::diagonal(&vec![lambda; d]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn inv_op_norm(&self) -> f64 {
        self.inv_op_norm
    }

    /// The composed function x ↦ f(Ax). Gaussian kinds stay closed under
    /// the composition (as quadratic forms); everything else is wrapped and
    /// measured numerically.
    pub fn apply(&self, f: &TestFunction) -> Result<TestFunction, DilationError> {
        if f.dim() != self.dim() {
            return Err(DilationError::Dimension(format!(
                "function dimension {} vs matrix dimension {}",
                f.dim(),
                self.dim()
            )));
        }
        Ok(compose(&self.matrix, &self.inverse, f))
    }

    /// |det A|^(−1/p): the exact L_p ratio of the dilation, for every f.
    pub fn predicted_lp_ratio(&self, p: f64) -> f64 {
        self.det.abs().powf(-1.0 / p)
    }

    /// Both candidate bounds for the weighted operator norm.
    pub fn predicted_weighted_bound(&self, p: f64, alpha: f64) -> WeightedBoundPair {
        let det_part = self.det.abs().powf(-1.0 / p);
        WeightedBoundPair {
            derivation: det_part * self.inv_op_norm.powf(alpha / p),
            printed: det_part * self.op_norm.powf(-alpha / p),
        }
    }

    /// φ(Gζ, |det A|^(−1)): the sup-space operator bound.
    pub fn gls_bound(&self, zeta: &PsiFunction, cfg: &SupConfig) -> f64 {
        fundamental_gls(zeta, 1.0 / self.det.abs(), cfg)
    }

    /// Both candidate arguments for the weighted sup-space bound, evaluated
    /// through the fundamental function.
    pub fn weighted_gls_bound(
        &self,
        zeta: &PsiFunction,
        alpha: f64,
        cfg: &SupConfig,
    ) -> WeightedBoundPair {
        let det_inv = 1.0 / self.det.abs();
        WeightedBoundPair {
            derivation: fundamental_gls(zeta, det_inv * self.inv_op_norm.powf(alpha), cfg),
            printed: fundamental_gls(zeta, det_inv * self.op_norm.powf(-alpha), cfg),
        }
    }
}

/// The two variants of the weighted bound: `derivation` uses
/// |det A|^(−1/p)·‖A⁻¹‖^(α/p) (what the change-of-variables chain
/// establishes), `printed` uses |det A|^(−1/p)·‖A‖^(−α/p). They coincide
/// exactly when ‖A⁻¹‖ = ‖A‖^(−1), e.g. for scalar matrices.
#[derive(Debug, Clone, Copy)]
pub struct WeightedBoundPair {
    pub derivation: f64,
    pub printed: f64,
}

fn compose(matrix: &Matrix, inverse: &Matrix, f: &TestFunction) -> TestFunction {
    match f {
        TestFunction::Gaussian {
            centers,
            scales,
            amplitude,
        } => {
            // exp(-Σ ((Ax)_i - c_i)²/s_i²) = exp(-(x - A⁻¹c)ᵀ AᵀDA (x - A⁻¹c))
            let inv_sq: Vec<f64> = scales.iter().map(|s| 1.0 / (s * s)).collect();
            let d = Matrix::diagonal(&inv_sq);
            let q = matrix.transpose().matmul(&d).matmul(matrix);
            TestFunction::GaussianQuadratic {
                q,
                center: inverse.matvec(centers),
                amplitude: *amplitude,
            }
        }
        TestFunction::GaussianQuadratic {
            q,
            center,
            amplitude,
        } => TestFunction::GaussianQuadratic {
            q: matrix.transpose().matmul(q).matmul(matrix),
            center: inverse.matvec(center),
            amplitude: *amplitude,
        },
        TestFunction::Composed {
            matrix: first,
            inner,
        } => {
            // f(x) = g(Bx) gives V_A f (x) = g((BA) x)
            TestFunction::Composed {
                matrix: first.matmul(matrix),
                inner: inner.clone(),
            }
        }
        other => TestFunction::Composed {
            matrix: matrix.clone(),
            inner: Box::new(other.clone()),
        },
    }
}

/// A tuple of per-block dilations acting block-wise on R^d = ⊗ R^{m_j}.
#[derive(Debug, Clone)]
pub struct TensorDilation {
    blocks: Vec<Dilation>,
}

impl TensorDilation {
    pub fn new(blocks: Vec<Dilation>) -> Result<Self, DilationError> {
        if blocks.is_empty() {
            return Err(DilationError::Dimension("no blocks".into()));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Dilation] {
        &self.blocks
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim()).collect()
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    /// Apply block-wise. A function that factors over the blocks stays a
    /// product (each factor composed with its own block); anything else is
    /// composed with the assembled block-diagonal matrix.
    pub fn apply(&self, f: &TestFunction) -> Result<TestFunction, DilationError> {
        if f.dim() != self.dim() {
            return Err(DilationError::Dimension(format!(
                "function dimension {} vs tensor dimension {}",
                f.dim(),
                self.dim()
            )));
        }
        let dims = self.block_dims();
        if let Some(factors) = f.split_blocks(&dims) {
            let mut out = Vec::with_capacity(factors.len());
            for (g, b) in factors.iter().zip(self.blocks.iter()) {
                out.push(b.apply(g)?);
            }
            return Ok(TestFunction::Product { factors: out });
        }
        let big = Matrix::block_diagonal(
            &self
                .blocks
                .iter()
                .map(|b| b.matrix().clone())
                .collect::<Vec<_>>(),
        );
        let big_inv = Matrix::block_diagonal(
            &self
                .blocks
                .iter()
                .map(|b| b.inverse().clone())
                .collect::<Vec<_>>(),
        );
        Ok(compose(&big, &big_inv, f))
    }

    /// Λ_{p⃗}(A⃗) = ∏ |det A_j|^(−1/p_j): the predicted mixed-norm ratio.
    pub fn lambda(&self, pm: &MixedExponent) -> Result<f64, DilationError> {
        if pm.blocks() != self.blocks.len() {
            return Err(DilationError::Dimension(format!(
                "{} exponent blocks vs {} matrix blocks",
                pm.blocks(),
                self.blocks.len()
            )));
        }
        if pm.block_dims() != self.block_dims().as_slice() {
            return Err(DilationError::Dimension(
                "exponent block dimensions do not match the matrix blocks".into(),
            ));
        }
        let ln: f64 = self
            .blocks
            .iter()
            .zip(pm.exponents())
            .map(|(b, &p)| -b.det().abs().ln() / p)
            .sum();
        Ok(ln.exp())
    }

    /// The product of per-block cubes of side |det A_j|^(−1/m_j); block j
    /// has volume |det A_j|^(−1), so its per-block fundamental value at p_j
    /// is |det A_j|^(−1/p_j).
    pub fn k_cube(&self) -> ProductSet {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let m = b.dim();
                let side = b.det().abs().powf(-1.0 / m as f64);
                SetBlock::Cuboid {
                    sides: vec![side; m],
                }
            })
            .collect();
        ProductSet::new(blocks).expect("nonempty by construction")
    }

    /// φ(Gζ, K(m⃗, p⃗)) = sup_{p⃗} Λ_{p⃗}(A⃗)/ζ(p⃗): the sup-space bound for
    /// the tensor dilation.
    pub fn agls_bound(&self, zeta: &PsiMulti, cfg: &SupConfig) -> Result<f64, DilationError> {
        Ok(fundamental_agls(zeta, &self.k_cube(), cfg)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::Parallelepiped;
    use crate::integrate::{lp_norm, lp_norm_with, Backend};
    use crate::mathcore::RealPos;

    #[test]
    fn construction_caches() {
        let v = Dilation::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert!((v.det() - 6.0).abs() < 1e-13);
        assert!((v.op_norm() - 3.0).abs() < 1e-10);
        assert!((v.inv_op_norm() - 0.5).abs() < 1e-10);
        let id = Dilation::new(Matrix::identity(2)).unwrap();
        assert!((id.det() - 1.0).abs() < 1e-15);
        assert!((id.op_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shear_op_norm_is_golden() {
        let v = Dilation::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((v.det() - 1.0).abs() < 1e-13);
        assert!((v.op_norm() - golden).abs() < 1e-10);
    }

    #[test]
    fn projection_matrix_rejected() {
        let err = Dilation::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(err, Err(DilationError::Singular(_))));
    }

    #[test]
    fn invariants_on_conditioned_matrices() {
        // op_norm >= |det|^(1/d) >= 1/inv_op_norm, and A·A⁻¹ = I
        let mats = [
            vec![vec![1.5, -0.4], vec![0.3, 1.1]],
            vec![vec![0.5, 1.2], vec![-1.0, 0.7]],
            vec![
                vec![1.0, 0.2, -0.3],
                vec![0.1, -1.4, 0.5],
                vec![0.6, 0.0, 0.9],
            ],
        ];
        for rows in &mats {
            let v = Dilation::from_rows(rows).unwrap();
            let d = v.dim() as f64;
            let root = v.det().abs().powf(1.0 / d);
            assert!(v.op_norm() + 1e-12 >= root);
            assert!(root + 1e-12 >= 1.0 / v.inv_op_norm());
            let prod = v.matrix().matmul(v.inverse());
            for i in 0..v.dim() {
                for j in 0..v.dim() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((prod.get(i, j) - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn predicted_ratios() {
        let v = Dilation::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert!((v.predicted_lp_ratio(1.0) - 1.0 / 6.0).abs() < 1e-14);
        let one = Dilation::new(Matrix::identity(3)).unwrap();
        for p in [1.0, 2.0, 10.0] {
            assert_eq!(one.predicted_lp_ratio(p), 1.0);
        }
        // composition multiplicativity through the determinant
        let a = Matrix::from_rows(&[vec![1.5, 0.2], vec![-0.1, 0.8]]).unwrap();
        let b = Matrix::from_rows(&[vec![0.9, -0.5], vec![0.4, 1.2]]).unwrap();
        let va = Dilation::new(a.clone()).unwrap();
        let vb = Dilation::new(b.clone()).unwrap();
        let vab = Dilation::new(a.matmul(&b)).unwrap();
        for p in [1.0, 2.5, 7.0] {
            let lhs = vab.predicted_lp_ratio(p);
            let rhs = va.predicted_lp_ratio(p) * vb.predicted_lp_ratio(p);
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn weighted_bound_variants() {
        let v = Dilation::from_rows(&[vec![2.0, 0.0], vec![0.0, 8.0]]).unwrap();
        let pair = v.predicted_weighted_bound(2.0, 1.0);
        // |det| = 16, ‖A⁻¹‖ = 1/2: derivation bound = (1/4)·(1/2)^(1/2) = 2^(-5/2)
        assert!((pair.derivation - 2.0_f64.powf(-2.5)).abs() < 1e-12);
        // printed variant uses ‖A‖ = 8
        assert!((pair.printed - 0.25 * 8.0_f64.powf(-0.5)).abs() < 1e-12);
        // scalar matrices: both coincide
        let s = Dilation::scalar(2.0, 2).unwrap();
        let pair = s.predicted_weighted_bound(2.0, 1.0);
        assert!((pair.derivation - pair.printed).abs() < 1e-12);
        // alpha = 0 reduces to the plain ratio
        let pair = v.predicted_weighted_bound(2.0, 0.0);
        assert!((pair.derivation - v.predicted_lp_ratio(2.0)).abs() < 1e-15);
    }

    #[test]
    fn apply_identity_and_scaling() {
        let f = TestFunction::box_indicator(
            Parallelepiped::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(),
        );
        let id = Dilation::new(Matrix::identity(2)).unwrap();
        let g = id.apply(&f).unwrap();
        assert_eq!(g.eval(&[0.5, 0.5]), 1.0);
        assert_eq!(g.eval(&[1.5, 0.5]), 0.0);

        // A = 2I on [0,1]^2 gives the indicator of [0,1/2]^2
        let two = Dilation::scalar(2.0, 2).unwrap();
        let g = two.apply(&f).unwrap();
        assert_eq!(g.eval(&[0.4, 0.4]), 1.0);
        assert_eq!(g.eval(&[0.6, 0.4]), 0.0);
        let vol = lp_norm_with(&g, 1.0, Backend::Quadrature).unwrap();
        assert!((vol.value - 0.25).abs() < 1e-8);
    }

    #[test]
    fn apply_gaussian_stays_closed_form() {
        let f = TestFunction::gaussian(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let v = Dilation::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let g = v.apply(&f).unwrap();
        // evaluation is the composition
        let x = [0.3, -0.7];
        let ax = [x[0] + x[1], x[1]];
        assert!((g.eval(&x) - f.eval(&ax)).abs() < 1e-15);
        // the L_p ratio matches |det|^{-1/p} = 1 exactly
        let p = 2.5;
        let a = lp_norm(&g, p).unwrap().value;
        let b = lp_norm(&f, p).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gls_bound_examples() {
        let cfg = SupConfig::default();
        let one = PsiFunction::constant(1.0, 1.0, f64::INFINITY).unwrap();
        let id = Dilation::new(Matrix::identity(2)).unwrap();
        assert!((id.gls_bound(&one, &cfg) - 1.0).abs() < 1e-6);
        let quarter = Dilation::from_rows(&[vec![0.25, 0.0], vec![0.0, 0.25]]).unwrap();
        // |det| = 1/16: sup of 16^(1/p) at p → 1⁺
        assert!((quarter.gls_bound(&one, &cfg) - 16.0).abs() < 2e-5);
    }

    #[test]
    fn tensor_lambda_and_k_cube() {
        let b1 = Dilation::scalar(2.0, 1).unwrap();
        let b2 = Dilation::scalar(3.0, 1).unwrap();
        let t = TensorDilation::new(vec![b1, b2]).unwrap();
        let pm = MixedExponent::per_coordinate(vec![1.0, 1.0]).unwrap();
        assert!((t.lambda(&pm).unwrap() - 1.0 / 6.0).abs() < 1e-14);

        // identity blocks give lambda 1
        let id = TensorDilation::new(vec![
            Dilation::new(Matrix::identity(1)).unwrap(),
            Dilation::new(Matrix::identity(2)).unwrap(),
        ])
        .unwrap();
        let pm = MixedExponent::new(vec![2.0, 3.0], vec![1, 2]).unwrap();
        assert!((id.lambda(&pm).unwrap() - 1.0).abs() < 1e-15);

        // k-cube sides: det 8 in a 3-dim block gives side 1/2 and volume 1/8
        let b = Dilation::new(Matrix::diagonal(&[2.0, 2.0, 2.0])).unwrap();
        let t = TensorDilation::new(vec![b]).unwrap();
        let cube = t.k_cube();
        match &cube.blocks[0] {
            SetBlock::Cuboid { sides } => {
                assert_eq!(sides.len(), 3);
                assert!((sides[0] - 0.5).abs() < 1e-14);
            }
            _ => panic!("expected a cube"),
        }
        // φ_{p⃗}(K) equals Λ_{p⃗} through the box formula
        let pm = MixedExponent::new(vec![2.7], vec![3]).unwrap();
        let phi = cube.fundamental_at(&[2.7]).unwrap();
        assert!((phi - t.lambda(&pm).unwrap()).abs() <= 1e-13 * phi);
    }

    #[test]
    fn tensor_agls_bound_single_block_reduces_to_gls() {
        let cfg = SupConfig::default();
        let v = Dilation::scalar(4.0, 1).unwrap();
        let zeta = PsiFunction::power(RealPos::new(1.0).unwrap(), 1.1, 10.0).unwrap();
        let t = TensorDilation::new(vec![v.clone()]).unwrap();
        let a = t
            .agls_bound(&PsiMulti::Factorable(vec![zeta.clone()]), &cfg)
            .unwrap();
        let b = v.gls_bound(&zeta, &cfg);
        assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
    }
}
