//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! `FHT_EXTENDED=1` adds the N = 1000 / 2000 runs. `FHT_STRICT=1` turns any
//! FAIL into a non-zero exit; by default the binary only fails when a check
//! cannot be evaluated at all.

use std::time::Instant;

use fhtoeplitz::asymptotics::shift_comparison;
use fhtoeplitz::eigensolver::{
    check_biorthonormality, check_completeness, decompose, eig_dense, eigenvalues_dense, labeled_eigenvector,
    labeled_spectrum, GridDenominator, DEFAULT_ORDER_CAP,
};
use fhtoeplitz::quasiparticle::{fit_constant, fit_log_law, momentum_record, LRule, MomentumRecord, Window};
use fhtoeplitz::symbol::winding_number;
use fhtoeplitz::toeplitz::{build_matrix, element, element_numeric};
use fhtoeplitz::wienerhopf::{
    compare_with_exact, default_window, psi_s_coeffs, psi_wh_coeffs, shift_example_factorization,
};
use fhtoeplitz::{Complex64, FHParams};

const GRID: GridDenominator = GridDenominator::OrderMinusOne;

struct Tally {
    pass: usize,
    fail: usize,
}

impl Tally {
    fn report(&mut self, id: u32, title: &str, ok: bool, detail: &str) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
        println!("{} [{id:>2}] {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn note(text: &str) {
    println!("     note: {text}");
}

fn fh() -> FHParams {
    FHParams::new(1.0 / 3.0, -0.5).unwrap()
}

/// Momentum records for one rule, timed individually.
fn records(rule: LRule, ns: &[usize]) -> Vec<(MomentumRecord, f64)> {
    ns.iter()
        .map(|&n| {
            let t = Instant::now();
            let r = momentum_record(fh(), n, rule.label(n), Window::default(), GRID).unwrap();
            (r, t.elapsed().as_secs_f64())
        })
        .collect()
}

fn find(recs: &[(MomentumRecord, f64)], n: usize) -> &MomentumRecord {
    &recs.iter().find(|(r, _)| r.n == n).unwrap().0
}

fn criterion_1(t: &mut Tally, half: &[(MomentumRecord, f64)], extended: bool) {
    let printed = [
        (40, 0.213238, 0.213463),
        (100, 0.101950, 0.101961),
        (200, 0.0570298, 0.0570311),
        (400, 0.0314841, 0.0314842),
    ];
    let extra = [(1000, 0.0141435, 0.0141435), (2000, 0.00765381, 0.00765381)];
    let mut ok = true;
    let mut parts = Vec::new();
    let rows: Vec<_> = printed.iter().chain(if extended { &extra[..] } else { &[] }).collect();
    for &&(n, psi, eps) in &rows {
        let r = find(half, n);
        let (dp, de) = ((r.p_psi.im - psi).abs(), (r.p_eps.im - eps).abs());
        ok &= dp <= 2e-6 && de <= 2e-6;
        parts.push(format!(
            "N={n} psi {:.7} ({:+.1e}) eps {:.7} ({:+.1e})",
            r.p_psi.im,
            r.p_psi.im - psi,
            r.p_eps.im,
            r.p_eps.im - eps
        ));
    }
    let time = |n: usize| half.iter().find(|(r, _)| r.n == n).unwrap().1;
    let small = [40, 100, 200].iter().map(|&n| time(n)).fold(0.0, f64::max);
    let t400 = time(400);
    ok &= small < 10.0 && t400 < 120.0;
    t.report(
        1,
        "reference Im p, half rule, tolerance 2e-6",
        ok,
        &format!("{}; runtime max(N<=200) {small:.2}s, N=400 {t400:.2}s", parts.join("; ")),
    );
}

fn criterion_2(t: &mut Tally, golden: &[(MomentumRecord, f64)]) {
    let printed = [(40, 0.212772), (100, 0.101397)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, psi) in printed {
        let r = find(golden, n);
        ok &= (r.p_psi.im - psi).abs() <= 2e-6;
        parts.push(format!("N={n} l={} psi {:.7} ({:+.1e})", r.l, r.p_psi.im, r.p_psi.im - psi));
    }
    t.report(2, "reference Im p_psi, golden rule, tolerance 2e-6", ok, &parts.join("; "));
}

fn anchored(recs: &[(MomentumRecord, f64)], upto: usize) -> f64 {
    let pts: Vec<(usize, f64)> = recs
        .iter()
        .filter(|(r, _)| r.n <= upto)
        .map(|(r, _)| (r.n, r.q_psi.re * r.n as f64))
        .collect();
    fit_constant(&pts).unwrap().constant
}

fn criterion_3(t: &mut Tally, half: &[(MomentumRecord, f64)], golden: &[(MomentumRecord, f64)]) {
    let largest = half.iter().map(|(r, _)| r.n).max().unwrap();
    let v3 = find(half, 100).q_psi.re * 1e6;
    let v4 = find(golden, 100).q_psi.re * 1e6;
    let row_ok = ((v3 - 1265.36) / 1265.36).abs() <= 1e-3 && ((v4 + 14949.0) / 14949.0).abs() <= 1e-3;
    let c3 = anchored(half, largest);
    let c4 = anchored(golden, largest);
    let const_ok = ((c3 - 0.00760) / 0.00760).abs() <= 0.01 && ((c4 + 1.618) / 1.618).abs() <= 0.01;
    t.report(
        3,
        "reference Re q_psi N at N=100 (0.1%) and fit constants (1%)",
        row_ok && const_ok,
        &format!(
            "N=100: {v3:.2} vs 1265.36, {v4:.1} vs -14949; constants anchored at N={largest}: {c3:.5} vs 0.00760, {c4:.4} vs -1.618"
        ),
    );
    if largest > 1000 {
        note(&format!(
            "anchored at N=1000 instead: {:.5} (half), {:.4} (golden)",
            anchored(half, 1000),
            anchored(golden, 1000)
        ));
    }
}

fn criterion_4(t: &mut Tally, half: &[(MomentumRecord, f64)]) {
    let pts: Vec<(usize, f64)> = [40, 100, 200, 400, 1000]
        .iter()
        .map(|&n| (n, find(half, n).p_psi.im * n as f64))
        .collect();
    let fit = fit_log_law(&pts, 1.0 / 3.0).unwrap();
    // residuals are ordered like the input, i.e. by increasing N
    let res: Vec<f64> = fit.residuals.iter().map(|&(_, r)| r).collect();
    let monotone = res.windows(2).all(|w| w[0].abs() > w[1].abs());
    let ok = monotone && res[0].abs() <= 0.3 && (1.60..=1.80).contains(&fit.lstsq_slope);
    t.report(
        4,
        "anchored log-law fit on N={40..1000}",
        ok,
        &format!(
            "C={:.4}, residuals {:?}, unconstrained slope {:.4}",
            fit.constant,
            res.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>(),
            fit.lstsq_slope
        ),
    );
}

fn criterion_5(t: &mut Tally) {
    let start = Instant::now();
    let mut ok = true;
    let mut counts = Vec::new();
    for (beta, expected) in [(-0.5, -1), (0.5, 1)] {
        let p = FHParams::new(1.0 / 3.0, beta).unwrap();
        let eigs = eigenvalues_dense(&build_matrix(p, 40).unwrap(), DEFAULT_ORDER_CAP).unwrap();
        let hits = eigs
            .iter()
            .filter(|&&e| winding_number(p, e, 4096).ok() == Some(expected))
            .count();
        ok &= hits == 40;
        counts.push(format!("beta={beta}: {hits}/40 with nu={expected:+}"));
    }
    let secs = start.elapsed().as_secs_f64();
    t.report(5, "winding numbers at N=40", ok && secs < 30.0, &format!("{}; {secs:.2}s", counts.join(", ")));
}

fn criterion_6(t: &mut Tally) {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in [40, 100, 200] {
        let d = decompose(&build_matrix(fh(), n).unwrap(), GRID).unwrap();
        let (b, c) = (check_biorthonormality(&d), check_completeness(&d));
        worst = worst.max(b).max(c);
        parts.push(format!("N={n} biorth {b:.1e} compl {c:.1e}"));
    }
    t.report(6, "biorthonormality and completeness <= 1e-8", worst <= 1e-8, &parts.join("; "));
}

/// Largest distance from each element of `a` to its greedy partner in `b`.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn criterion_7(t: &mut Tally) {
    let e = |p: FHParams| eigenvalues_dense(&build_matrix(p, 60).unwrap(), DEFAULT_ORDER_CAP).unwrap();
    let a = e(fh());
    let b = e(fh().reflected());
    let flip = multiset_distance(&a, &b);
    let conj: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
    let closure = multiset_distance(&a, &conj);
    t.report(
        7,
        "parity beta -> -beta (1e-9) and conjugation closure (1e-10), N=60",
        flip <= 1e-9 && closure <= 1e-10,
        &format!("flip {flip:.1e}, conjugation {closure:.1e}"),
    );
}

fn criterion_8(t: &mut Tally) {
    let eps = Complex64::new(0.3, 0.0);
    let f = shift_example_factorization(eps, 40).unwrap();
    let fact = f
        .psi
        .iter()
        .enumerate()
        .map(|(j, c)| (c - eps.powu(j as u32)).norm())
        .fold(0.0, f64::max);
    let shift = FHParams::new(0.0, -1.0).unwrap();
    let m = build_matrix(shift, 6).unwrap();
    // T^N by repeated dense products
    let dense = m.to_dense();
    let n = m.order;
    let mut power = dense.clone();
    for _ in 1..n {
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = power[i * n + k];
                if a != 0.0 {
                    for j in 0..n {
                        next[i * n + j] += a * dense[k * n + j];
                    }
                }
            }
        }
        power = next;
    }
    let nilpotent = power.iter().all(|&x| x == 0.0);
    let eigs_zero = eig_dense(&m, DEFAULT_ORDER_CAP)
        .unwrap()
        .eigenvalues
        .iter()
        .all(|e| *e == Complex64::new(0.0, 0.0));
    let elements_ok = (-20..=20).all(|k| {
        let v = element(shift, k).unwrap();
        if k == -1 {
            v == -1.0
        } else {
            v == 0.0
        }
    });
    t.report(
        8,
        "shift-matrix anchor",
        fact <= 1e-12 && nilpotent && eigs_zero && elements_ok,
        &format!(
            "factorization max |psi_j - eps^j| {fact:.1e}; T^N = 0: {nilpotent}; eigenvalues all zero: {eigs_zero}; T(-1) = -1, rest 0: {elements_ok}"
        ),
    );
    let wh = psi_wh_coeffs(shift, eps, 16, None).unwrap();
    let dev = wh
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| (c / wh.coeffs[0] - (-eps).powu(j as u32)).norm())
        .fold(0.0, f64::max);
    note(&format!(
        "quadrature route for the family member a(z) = -1/z gives (-eps)^j to {dev:.1e}"
    ));
}

struct WhRun {
    max_abs: f64,
    rel3: f64,
    rel9: f64,
    slope: Option<f64>,
    secs: f64,
}

fn wh_run(n: usize, with_slope: bool) -> WhRun {
    let start = Instant::now();
    let l = (n - 1) / 4;
    let m = build_matrix(fh(), n).unwrap();
    let spec = labeled_spectrum(&m, GRID).unwrap();
    let psi = labeled_eigenvector(&m, &spec, l).unwrap();
    let eps = spec.eigenvalues[l];
    let wh = psi_wh_coeffs(fh(), eps, n, None).unwrap();
    let rep = compare_with_exact(&wh, &psi, default_window(n)).unwrap();
    let slope = with_slope.then(|| {
        let (s, _) = psi_s_coeffs(fh(), eps, 2000).unwrap();
        let pts: Vec<(f64, f64)> = (100..=1000).map(|j| ((j as f64).ln(), s[j].norm().ln())).collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    WhRun {
        max_abs: rep.max_abs_err_up_to(0.5),
        rel3: rep.rel_err_at(0.3),
        rel9: rep.rel_err_at(0.9),
        slope,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn criterion_9_10(t: &mut Tally, extended: bool) {
    let r = wh_run(400, true);
    t.report(
        9,
        "Wiener-Hopf vs exact at N=400, l=99",
        r.max_abs <= 1e-4 && r.rel9 > 10.0 * r.rel3,
        &format!(
            "max abs err (j/(N-1) <= 0.5) {:.2e}; rel err {:.2e} at 0.3, {:.2e} at 0.9; {:.1}s",
            r.max_abs, r.rel3, r.rel9, r.secs
        ),
    );
    if extended {
        let e = wh_run(1000, false);
        t.report(
            9,
            "extended: Wiener-Hopf vs exact at N=1000, l=249 (few 1e-7 within 10x)",
            e.max_abs <= 3e-6,
            &format!("max abs err {:.2e}; {:.1}s", e.max_abs, e.secs),
        );
    }
    let slope = r.slope.unwrap();
    t.report(
        10,
        "psi_S tail slope over j in [100, 1000]",
        (slope + 5.0 / 3.0).abs() <= 0.05,
        &format!("{slope:.4} vs -5/3"),
    );
}

fn criterion_11(t: &mut Tally) {
    let worst = (-50..=50)
        .map(|n| (element_numeric(fh(), n, 256).unwrap() - element(fh(), n).unwrap()).norm())
        .fold(0.0, f64::max);
    t.report(11, "closed-form vs Fourier elements, |n| <= 50", worst <= 1e-10, &format!("max {worst:.2e}"));
}

fn criterion_12(t: &mut Tally) {
    let rows: Vec<_> = [100, 200, 400]
        .iter()
        .map(|&n| {
            let l = ((n - 1) as f64 * 0.25).floor() as usize;
            let eigs = labeled_spectrum(&build_matrix(fh(), n).unwrap(), GRID).unwrap();
            shift_comparison(fh(), eigs.eigenvalues[l], n, l, GRID).unwrap()
        })
        .collect();
    let dev: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    let ok = dev.windows(2).all(|w| w[1] < w[0]) && dev[2] < 0.25;
    t.report(
        12,
        "eigenvalue-shift formula at l/(N-1) = 1/4",
        ok,
        &format!("relative deviation N=100 {:.3}, 200 {:.3}, 400 {:.3}", dev[0], dev[1], dev[2]),
    );
    note(&format!(
        "measured against a(e^(-i Re p)) instead of the grid value: {:.3}, {:.3}, {:.3}",
        rows[0].deviation_imag_only, rows[1].deviation_imag_only, rows[2].deviation_imag_only
    ));
}

fn main() {
    let extended = std::env::var("FHT_EXTENDED").is_ok_and(|v| v == "1");
    let strict = std::env::var("FHT_STRICT").is_ok_and(|v| v == "1");
    let mut t = Tally { pass: 0, fail: 0 };
    let start = Instant::now();
    println!("acceptance (extended: {extended})");

    let mut ns = vec![40, 100, 200, 400, 1000];
    if extended {
        ns.push(2000);
    }
    let half = records(LRule::Half, &ns);
    let golden = records(LRule::Golden, &ns);

    criterion_1(&mut t, &half, extended);
    criterion_2(&mut t, &golden);
    criterion_3(&mut t, &half, &golden);
    criterion_4(&mut t, &half);
    criterion_5(&mut t);
    criterion_6(&mut t);
    criterion_7(&mut t);
    criterion_8(&mut t);
    criterion_9_10(&mut t, extended);
    criterion_11(&mut t);
    criterion_12(&mut t);

    println!(
        "acceptance: {} passed, {} failed ({:.1}s)",
        t.pass,
        t.fail,
        start.elapsed().as_secs_f64()
    );
    if strict && t.fail > 0 {
        std::process::exit(1);
    }
}
