//! Continuous Lagrange finite elements of degree 1 to 3 for the Dirichlet
//! problem `-u'' = f` on an interval, and `W^{m,p}` error norms.

use std::sync::Arc;

use super::gauss::GaussLegendre;
use super::mesh::Mesh1D;
use crate::error::{domain, Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A 1D Poisson problem with known exact solution.
///
/// `derivatives[j]` is the `j`-th derivative of the exact solution,
/// `j = 0..=4`; the forcing term is `-u''`.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    pub derivatives: [ScalarFn; 5],
    pub forcing: ScalarFn,
    pub interval: (f64, f64),
}

impl std::fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedProblem")
            .field("name", &self.name)
            .field("interval", &self.interval)
            .finish_non_exhaustive()
    }
}

impl ManufacturedProblem {
    /// Builds a problem with `f = -u''` derived from the supplied derivatives.
    pub fn new(name: impl Into<String>, interval: (f64, f64), derivatives: [ScalarFn; 5]) -> Self {
        let d2 = derivatives[2].clone();
        Self {
            name: name.into(),
            forcing: Arc::new(move |x| -d2(x)),
            derivatives,
            interval,
        }
    }

    /// `u = sin(pi x)` on `[0, 1]`, `f = pi^2 sin(pi x)`.
    pub fn sin_pi() -> Self {
        use std::f64::consts::PI;
        Self::new(
            "sin-pi",
            (0.0, 1.0),
            [
                Arc::new(|x| (PI * x).sin()),
                Arc::new(|x| PI * (PI * x).cos()),
                Arc::new(|x| -PI * PI * (PI * x).sin()),
                Arc::new(|x| -PI.powi(3) * (PI * x).cos()),
                Arc::new(|x| PI.powi(4) * (PI * x).sin()),
            ],
        )
    }

    /// `u = exp(x)` on `[0, 1]`, inhomogeneous Dirichlet values.
    pub fn exp() -> Self {
        let e: ScalarFn = Arc::new(f64::exp);
        Self::new(
            "exp",
            (0.0, 1.0),
            [e.clone(), e.clone(), e.clone(), e.clone(), e],
        )
    }

    /// `u = x^d` on `[0, 1]` for `d <= 4`.
    pub fn monomial(d: u32) -> Self {
        assert!(d <= 4, "monomial degree must be <= 4");
        let mk = |j: u32| -> ScalarFn {
            if j > d {
                return Arc::new(|_| 0.0);
            }
            let coef: f64 = ((d - j + 1)..=d).map(f64::from).product();
            let pow = (d - j) as i32;
            Arc::new(move |x: f64| coef * x.powi(pow))
        };
        Self::new(
            format!("x^{d}"),
            (0.0, 1.0),
            [mk(0), mk(1), mk(2), mk(3), mk(4)],
        )
    }

    pub fn u(&self, x: f64) -> f64 {
        (self.derivatives[0])(x)
    }

    pub fn du(&self, x: f64) -> f64 {
        (self.derivatives[1])(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.forcing)(x)
    }

    pub fn boundary_values(&self) -> (f64, f64) {
        (self.u(self.interval.0), self.u(self.interval.1))
    }

    /// Largest `|-u'' - f|` on a uniform grid of `n` points.
    pub fn residual(&self, n: usize) -> f64 {
        let (a, b) = self.interval;
        (0..n)
            .map(|i| {
                let x = a + (b - a) * i as f64 / (n - 1).max(1) as f64;
                (-(self.derivatives[2])(x) - self.f(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Lagrange basis on `[0, 1]` with equispaced nodes `j / k`.
#[derive(Debug, Clone)]
struct RefBasis {
    nodes: Vec<f64>,
}

impl RefBasis {
    fn new(k: usize) -> Self {
        Self {
            nodes: (0..=k).map(|j| j as f64 / k as f64).collect(),
        }
    }

    fn value(&self, i: usize, t: f64) -> f64 {
        let ti = self.nodes[i];
        self.nodes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &tj)| (t - tj) / (ti - tj))
            .product()
    }

    fn derivative(&self, i: usize, t: f64) -> f64 {
        let ti = self.nodes[i];
        let mut sum = 0.0;
        for (l, &tl) in self.nodes.iter().enumerate() {
            if l == i {
                continue;
            }
            let mut term = 1.0 / (ti - tl);
            for (j, &tj) in self.nodes.iter().enumerate() {
                if j != i && j != l {
                    term *= (t - tj) / (ti - tj);
                }
            }
            sum += term;
        }
        sum
    }
}

/// Galerkin solution: values at the Lagrange points of every element,
/// element `e` owning global dofs `e*k ..= e*k + k`.
#[derive(Debug, Clone)]
pub struct FeSolution {
    pub mesh: Mesh1D,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    basis: RefBasis,
}

impl FeSolution {
    pub fn new(mesh: Mesh1D, degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        check_degree(degree)?;
        let expected = degree * mesh.n_elements() + 1;
        if coefficients.len() != expected {
            return Err(domain(format!(
                "P{degree} on {} elements needs {expected} coefficients, got {}",
                mesh.n_elements(),
                coefficients.len()
            )));
        }
        Ok(Self {
            mesh,
            degree,
            coefficients,
            basis: RefBasis::new(degree),
        })
    }

    fn local(&self, e: usize) -> &[f64] {
        &self.coefficients[e * self.degree..=(e + 1) * self.degree]
    }

    /// Value and derivative on element `e` at local coordinate `t ∈ [0, 1]`.
    fn eval_local(&self, e: usize, t: f64) -> (f64, f64) {
        let (x0, x1) = self.mesh.element(e);
        let len = x1 - x0;
        let c = self.local(e);
        let mut v = 0.0;
        let mut d = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            v += ci * self.basis.value(i, t);
            d += ci * self.basis.derivative(i, t);
        }
        (v, d / len)
    }

    pub fn value(&self, x: f64) -> f64 {
        let e = self.mesh.locate(x);
        let (x0, x1) = self.mesh.element(e);
        self.eval_local(e, (x - x0) / (x1 - x0)).0
    }

    /// Derivative at `x`, taken from the element containing `x` (right
    /// element at interior nodes).
    pub fn derivative(&self, x: f64) -> f64 {
        let e = self.mesh.locate(x);
        let (x0, x1) = self.mesh.element(e);
        self.eval_local(e, (x - x0) / (x1 - x0)).1
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if (1..=3).contains(&degree) {
        Ok(())
    } else {
        Err(domain(format!(
            "element degree must be 1, 2 or 3, got {degree}"
        )))
    }
}

/// Symmetric banded matrix with half-bandwidth `bw`, stored by rows over
/// columns `i - bw ..= i + bw`.
struct Banded {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl Banded {
    fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.bw >= i && j <= i + self.bw);
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    /// Gaussian elimination without pivoting (the stiffness matrix is SPD).
    fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let pivot = self.get(k, k);
            if !(pivot.abs() > 0.0) {
                return Err(domain(format!("singular stiffness matrix at row {k}")));
            }
            for i in (k + 1)..n.min(k + bw + 1) {
                let factor = self.get(i, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..n.min(k + bw + 1) {
                    let v = self.get(k, j);
                    self.add(i, j, -factor * v);
                }
                rhs[i] -= factor * rhs[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = rhs[k];
            for j in (k + 1)..n.min(k + bw + 1) {
                s -= self.get(k, j) * rhs[j];
            }
            rhs[k] = s / self.get(k, k);
        }
        Ok(rhs)
    }
}

/// Galerkin `P_k` solution of `-u'' = f` with the exact Dirichlet values.
pub fn solve_poisson_1d(
    problem: &ManufacturedProblem,
    mesh: &Mesh1D,
    degree: usize,
) -> Result<FeSolution> {
    check_degree(degree)?;
    let k = degree;
    let basis = RefBasis::new(k);
    let gauss = GaussLegendre::new(2 * k + 2);
    let n_el = mesh.n_elements();
    let n_dof = k * n_el + 1;
    let mut stiff = Banded::zeros(n_dof, k);
    let mut load = vec![0.0; n_dof];

    let ref_pts: Vec<(f64, f64)> = gauss
        .nodes
        .iter()
        .zip(&gauss.weights)
        .map(|(&s, &w)| (0.5 * (s + 1.0), 0.5 * w))
        .collect();
    let mut local_k = vec![0.0; (k + 1) * (k + 1)];
    for (i, row) in local_k.chunks_mut(k + 1).enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = ref_pts
                .iter()
                .map(|&(t, w)| w * basis.derivative(i, t) * basis.derivative(j, t))
                .sum();
        }
    }

    for e in 0..n_el {
        let (x0, x1) = mesh.element(e);
        let len = x1 - x0;
        let base = e * k;
        for i in 0..=k {
            for j in 0..=k {
                stiff.add(base + i, base + j, local_k[i * (k + 1) + j] / len);
            }
            load[base + i] += len
                * ref_pts
                    .iter()
                    .map(|&(t, w)| w * problem.f(x0 + t * len) * basis.value(i, t))
                    .sum::<f64>();
        }
    }

    // Dirichlet rows: identity, values moved to the right-hand side.
    let (ua, ub) = problem.boundary_values();
    for (dof, val) in [(0, ua), (n_dof - 1, ub)] {
        for j in dof.saturating_sub(k)..n_dof.min(dof + k + 1) {
            if j != dof {
                let coupling = stiff.get(j, dof);
                load[j] -= coupling * val;
                let a = stiff.idx(j, dof);
                stiff.data[a] = 0.0;
                let b = stiff.idx(dof, j);
                stiff.data[b] = 0.0;
            }
        }
        let d = stiff.idx(dof, dof);
        stiff.data[d] = 1.0;
        load[dof] = val;
    }

    let coefficients = stiff.solve(load)?;
    FeSolution::new(mesh.clone(), degree, coefficients)
}

/// Value of a `W^{m,p}` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WmpNorm {
    pub m: u32,
    pub p: f64,
    pub value: f64,
}

/// `||u - u_h||_{m,p}` for `m ∈ {0, 1}`, `1 <= p < ∞`, using `2k + 4` Gauss
/// points per element.
pub fn error_norm(
    solution: &FeSolution,
    problem: &ManufacturedProblem,
    m: u32,
    p: f64,
) -> Result<WmpNorm> {
    error_norm_with_points(solution, problem, m, p, default_points(solution.degree))
}

/// Gauss points per element used by [`error_norm`] for degree `k`.
pub fn default_points(k: usize) -> usize {
    2 * k + 4
}

/// [`error_norm`] with an explicit number of Gauss points per element.
pub fn error_norm_with_points(
    solution: &FeSolution,
    problem: &ManufacturedProblem,
    m: u32,
    p: f64,
    points: usize,
) -> Result<WmpNorm> {
    if m >= 2 {
        return Err(Error::Unsupported(format!(
            "W^{{{m},p}} error norms need global derivatives of order {m}; only m = 0, 1 are supported"
        )));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Unsupported(format!(
            "Lebesgue exponent must satisfy 1 <= p < inf, got {p}"
        )));
    }
    let gauss = GaussLegendre::new(points.max(1));
    let mesh = &solution.mesh;
    let mut total = 0.0;
    for e in 0..mesh.n_elements() {
        let (x0, x1) = mesh.element(e);
        let len = x1 - x0;
        for (&s, &w) in gauss.nodes.iter().zip(&gauss.weights) {
            let t = 0.5 * (s + 1.0);
            let x = x0 + t * len;
            let (v, d) = solution.eval_local(e, t);
            let mut integrand = (problem.u(x) - v).abs().powf(p);
            if m == 1 {
                integrand += (problem.du(x) - d).abs().powf(p);
            }
            total += 0.5 * w * len * integrand;
        }
    }
    Ok(WmpNorm {
        m,
        p,
        value: total.powf(1.0 / p),
    })
}
