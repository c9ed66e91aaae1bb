//! One-dimensional quadrature: globally adaptive Gauss-Kronrod (7/15) with
//! user breakpoints, and composite Simpson with a doubling refinement loop.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Tolerances for the adaptive integrator. The integral is accepted when the
/// error estimate drops below `max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_evals: usize) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_evals,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Kronrod value and error estimate from the 15 samples of one segment:
/// `fc` at the centre, `fv1`/`fv2` at the mirrored nodes.
fn kronrod_rule(fc: f64, fv1: &[f64; 7], fv2: &[f64; 7], half: f64) -> (f64, f64) {
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let (f1, f2) = (fv1[j], fv2[j]);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_asc *= half.abs();
    res_abs *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let uflow = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if res_abs > uflow {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, error)
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
    }
    let (value, error) = kronrod_rule(f(center), &fv1, &fv2, half);
    Segment { a, b, value, error }
}

fn split_edges(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);
    edges
}

/// Integrates `f` over `[a, b]`, splitting first at every breakpoint that
/// falls strictly inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> QuadResult {
    if !(b > a) {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
            converged: true,
        };
    }
    let edges = split_edges(a, b, breakpoints);

    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let seg = kronrod15(&f, w[0], w[1]);
        evals += 15;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    let mut converged = total_err <= tol.abs_tol.max(tol.rel_tol * total.abs());
    while !converged && evals + 30 <= tol.max_evals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        converged = total_err <= tol.abs_tol.max(tol.rel_tol * total.abs());
    }

    // re-sum to shed drift from the running updates
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    let converged = converged || error <= tol.abs_tol.max(tol.rel_tol * value.abs());
    QuadResult {
        value,
        error,
        evals,
        converged,
    }
}

/// Segment of a paired integral, ordered by its worse error relative to the
/// two absolute tolerances.
#[derive(Debug, Clone, Copy)]
struct PairSegment {
    a: f64,
    b: f64,
    value: [f64; 2],
    error: [f64; 2],
    priority: f64,
}

impl PartialEq for PairSegment {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl Eq for PairSegment {}
impl PartialOrd for PairSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PairSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod15_pair<F: Fn(f64) -> (f64, f64)>(
    f: &F,
    a: f64,
    b: f64,
    tol: &[Tolerance; 2],
) -> PairSegment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [[0.0; 7]; 4];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (l0, l1) = f(center - dx);
        let (r0, r1) = f(center + dx);
        fv[0][j] = l0;
        fv[1][j] = r0;
        fv[2][j] = l1;
        fv[3][j] = r1;
    }
    let (c0, c1) = f(center);
    let (v0, e0) = kronrod_rule(c0, &fv[0], &fv[1], half);
    let (v1, e1) = kronrod_rule(c1, &fv[2], &fv[3], half);
    let scale = |e: f64, t: &Tolerance| e / t.abs_tol.max(f64::MIN_POSITIVE);
    PairSegment {
        a,
        b,
        value: [v0, v1],
        error: [e0, e1],
        priority: scale(e0, &tol[0]).max(scale(e1, &tol[1])),
    }
}

/// Integrates both components of `f` on shared nodes, refining until each
/// meets its own tolerance. The evaluation budget is `tol[0].max_evals`.
pub fn integrate_pair<F: Fn(f64) -> (f64, f64)>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: [Tolerance; 2],
) -> [QuadResult; 2] {
    let empty = QuadResult {
        value: 0.0,
        error: 0.0,
        evals: 0,
        converged: true,
    };
    if !(b > a) {
        return [empty, empty];
    }
    let ok = |v: &[f64; 2], e: &[f64; 2], i: usize| {
        e[i] <= tol[i].abs_tol.max(tol[i].rel_tol * v[i].abs())
    };
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let mut total = [0.0; 2];
    let mut total_err = [0.0; 2];
    for w in split_edges(a, b, breakpoints).windows(2) {
        let seg = kronrod15_pair(&f, w[0], w[1], &tol);
        evals += 15;
        for i in 0..2 {
            total[i] += seg.value[i];
            total_err[i] += seg.error[i];
        }
        heap.push(seg);
    }
    let mut converged = ok(&total, &total_err, 0) && ok(&total, &total_err, 1);
    while !converged && evals + 30 <= tol[0].max_evals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = kronrod15_pair(&f, worst.a, mid, &tol);
        let right = kronrod15_pair(&f, mid, worst.b, &tol);
        evals += 30;
        for i in 0..2 {
            total[i] += left.value[i] + right.value[i] - worst.value[i];
            total_err[i] += left.error[i] + right.error[i] - worst.error[i];
        }
        heap.push(left);
        heap.push(right);
        converged = ok(&total, &total_err, 0) && ok(&total, &total_err, 1);
    }
    let mut value = [0.0; 2];
    let mut error = [0.0; 2];
    for s in heap.iter() {
        for i in 0..2 {
            value[i] += s.value[i];
            error[i] += s.error[i];
        }
    }
    let converged = converged || (ok(&value, &error, 0) && ok(&value, &error, 1));
    [0, 1].map(|i| QuadResult {
        value: value[i],
        error: error[i],
        evals,
        converged,
    })
}

/// Composite Simpson rule on `n` panels (`n` even).
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n >= 2 && n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    (f(a) + f(b) + 4.0 * odd + 2.0 * even) * h / 3.0
}

/// Composite Simpson with panel doubling until two successive estimates differ
/// by less than `tol`, or the node count would exceed `node_cap`.
pub fn simpson_refined<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    start_panels: usize,
    node_cap: usize,
) -> QuadResult {
    let mut n = start_panels.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let mut prev = simpson(&f, a, b, n);
    let mut evals = n + 1;
    loop {
        if 2 * n + 1 > node_cap {
            return QuadResult {
                value: prev,
                error: f64::NAN,
                evals,
                converged: false,
            };
        }
        n *= 2;
        let next = simpson(&f, a, b, n);
        evals += n + 1;
        let diff = (next - prev).abs();
        if diff < tol {
            return QuadResult {
                value: next,
                error: diff,
                evals,
                converged: true,
            };
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> Tolerance {
        Tolerance::new(1e-13, 1e-12, 200_000)
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, &[], tight());
        assert!((r.value - 13.5).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn gaussian_integrates_to_one() {
        let r = integrate(crate::special::normal_pdf, -40.0, 40.0, &[0.0], tight());
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn pair_matches_separate_calls() {
        let f = |x: f64| (crate::special::normal_pdf(x - 1.0), x * crate::special::normal_pdf(x - 1.0));
        let [m, first] = integrate_pair(f, -30.0, 30.0, &[1.0], [tight(), tight()]);
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!((first.value - 1.0).abs() < 1e-12);
        assert!(m.converged && first.converged);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 5.0 };
        let r = integrate(step, 0.0, 1.0, &[0.3], tight());
        assert!((r.value - (0.3 + 3.5)).abs() < 1e-13);
        // without the breakpoint the adaptive loop still gets there
        let r = integrate(step, 0.0, 1.0, &[], Tolerance::new(1e-9, 0.0, 200_000));
        assert!((r.value - 3.8).abs() < 1e-8);
    }

    #[test]
    fn kink_converges() {
        let r = integrate(|x: f64| (x - 0.123).abs(), -1.0, 1.0, &[], tight());
        let exact = 0.5 * (1.123f64.powi(2) + 0.877f64.powi(2));
        assert!((r.value - exact).abs() < 1e-11);
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|_| 1.0, 1.0, 1.0, &[], tight());
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn simpson_refinement() {
        let r = simpson_refined(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 8, 1 << 20);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-11);
        let capped = simpson_refined(|x: f64| x.sin(), 0.0, 3.0, 0.0, 8, 64);
        assert!(!capped.converged);
    }
}
