//! Adaptive quadrature built on the Gauss 7 / Kronrod 15 pair with
//! interval bisection. The integrand is assumed finite on the closed
//! interval; singular endpoints must be handled by substitution or by
//! splitting at the singularity before calling in.

/// 15-point Kronrod abscissae (positive half, includes the Gauss-7 nodes).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Accuracy target for an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadTarget {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadTarget {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-300, max_depth: 40 }
    }
}

impl QuadTarget {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, max_depth: 40 }
    }
}

/// Value and error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(mid - x) + f(mid + x);
        kronrod += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    let err = {
        let diff = (kronrod - gauss).abs();
        // Standard QUADPACK-style error sharpening.
        let scaled = (200.0 * diff).powf(1.5);
        if scaled < diff { scaled } else { diff }
    };
    (kronrod, err)
}

struct Worker<'a, F> {
    f: &'a mut F,
    target: QuadTarget,
    evaluations: usize,
}

impl<F: FnMut(f64) -> f64> Worker<'_, F> {
    fn recurse(&mut self, a: f64, b: f64, whole: f64, whole_err: f64, depth: usize, scale: f64) -> (f64, f64) {
        let tol = self.target.abs_tol.max(self.target.rel_tol * scale.max(whole.abs()));
        if whole_err <= tol || depth >= self.target.max_depth || (b - a).abs() < 1e-15 * (a.abs() + b.abs() + 1.0) {
            return (whole, whole_err);
        }
        let mid = 0.5 * (a + b);
        let (lv, le) = gk15(a, mid, self.f);
        let (rv, re) = gk15(mid, b, self.f);
        self.evaluations += 30;
        let (lv, le) = self.recurse(a, mid, lv, le, depth + 1, scale);
        let (rv, re) = self.recurse(mid, b, rv, re, depth + 1, scale);
        (lv + rv, le + re)
    }
}

/// Integrate `f` over `[a, b]` with the default target.
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, f: F) -> QuadResult {
    integrate_with(a, b, QuadTarget::default(), f)
}

/// Integrate `f` over `[a, b]` against an explicit accuracy target.
/// The relative tolerance is interpreted against the magnitude of the
/// whole integral, so sub-intervals that contribute nothing are left alone.
pub fn integrate_with<F: FnMut(f64) -> f64>(a: f64, b: f64, target: QuadTarget, mut f: F) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, evaluations: 0 };
    }
    let (v0, e0) = gk15(a, b, &mut f);
    let mut worker = Worker { f: &mut f, target, evaluations: 15 };
    let (value, error) = worker.recurse(a, b, v0, e0, 0, v0.abs());
    QuadResult { value, error, evaluations: worker.evaluations }
}

/// Integrate over a list of panels, refining each panel adaptively. The
/// relative tolerance is applied against the running total, so panels that
/// are negligible relative to the sum are not over-refined.
pub fn integrate_panels<F: FnMut(f64) -> f64>(panels: &[(f64, f64)], target: QuadTarget, mut f: F) -> QuadResult {
    // First pass: coarse estimate of the total scale.
    let mut coarse = 0.0f64;
    let mut sketches = Vec::with_capacity(panels.len());
    for &(a, b) in panels {
        let (v, e) = gk15(a, b, &mut f);
        coarse += v.abs();
        sketches.push((v, e));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 15 * panels.len();
    for (&(a, b), &(v0, e0)) in panels.iter().zip(&sketches) {
        let mut worker = Worker { f: &mut f, target, evaluations: 0 };
        let (v, e) = worker.recurse(a, b, v0, e0, 0, coarse);
        value += v;
        error += e;
        evaluations += worker.evaluations;
    }
    QuadResult { value, error, evaluations }
}
