//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any asserted criterion fails.
//!
//! Runs without the libtest harness so the lines are always visible. A
//! positional argument selects criteria whose id contains it; `--ignored` or
//! `--include-ignored` adds the multi-hour X0(11) run over [1e8, 2e8].

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rayon::prelude::*;

use powres::ap_sources::{
    ap_elliptic_bsgs, ap_elliptic_naive, cm_curve, cm_curve_form, tau_series, ApProvider,
    EllipticCurve,
};
use powres::arith::{is_prime, jacobi, sieve_range, PrimeRange, Rational};
use powres::classfield::{
    check_inertia, extension_count_bruteforce, extension_count_exact, sample_inertia_primes,
};
use powres::cmforms::{ap_cm, CMFormSpec, CmValue};
use powres::density::{
    crosscheck_cm, estimate_delta, estimate_many, predict_delta, CebotarevFilter, DensityReport,
};
use powres::quadfield::{class_number, make_field, SplitType};
use powres::residue::pipibar_two_ways;

type Suite = (&'static str, fn() -> Vec<Line>);

struct Line {
    id: &'static str,
    pass: bool,
    /// Informational lines are printed but never fail the run.
    asserted: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    Line {
        id,
        pass,
        asserted: true,
        detail: detail.into(),
    }
}

fn info(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    Line {
        id,
        pass,
        asserted: false,
        detail: detail.into(),
    }
}

fn range(lo: u64, hi: u64) -> PrimeRange {
    PrimeRange::new(lo, hi).unwrap()
}

fn spec(d: u64, k: u64, alpha: &str) -> CMFormSpec {
    CMFormSpec::new(
        make_field(d).unwrap(),
        k,
        alpha.parse::<Rational>().unwrap(),
    )
    .unwrap()
}

fn curve(a: [i64; 5]) -> EllipticCurve {
    EllipticCurve::new(a).unwrap()
}

fn within(limit: Duration, t: Instant) -> (bool, String) {
    let e = t.elapsed();
    (
        e <= limit,
        format!("{:.1}s of {}s", e.as_secs_f64(), limit.as_secs()),
    )
}

fn identity_1a() -> Vec<Line> {
    let t = Instant::now();
    let mut out = Vec::new();
    let mut total = 0usize;
    let mut all_ok = true;
    for d in [1u64, 2, 7, 11, 19, 23, 31, 43, 47] {
        let field = make_field(d).unwrap();
        let results: Vec<(u64, bool)> = sieve_range(range(2, 100_000))
            .into_par_iter()
            .filter_map(|p| match field.split_type(p) {
                SplitType::Split(sp) => {
                    Some(pipibar_two_ways(&sp).map_or((p, false), |(a, b)| (p, a == b)))
                }
                _ => None,
            })
            .collect();
        let checked = results.len();
        let bad: Vec<u64> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
        total += checked;
        all_ok &= bad.is_empty() && checked > 0;
        if !bad.is_empty() {
            out.push(line(
                "1a",
                false,
                format!("d={d}: {} mismatches, first p={}", bad.len(), bad[0]),
            ));
        }
    }
    let (fast, time) = within(Duration::from_secs(30), t);
    out.push(line(
        "1a",
        all_ok && fast,
        format!(
            "pi/pibar symbol, 9 fields, {total} split primes < 1e5, 0 mismatches required; {time}"
        ),
    ));
    out
}

fn identity_1b() -> Vec<Line> {
    let t = Instant::now();
    let r = range(2, 100_000);
    let mut cases: Vec<(CMFormSpec, u64)> = Vec::new();
    for d in [1u64, 2, 7, 11] {
        for k in [2u64, 3, 4] {
            for alpha in ["1", "-1", "2", "3/5"] {
                cases.push((spec(d, k, alpha), 2));
            }
        }
    }
    // h = 3: k must be 1 mod 3
    for k in [4u64, 7] {
        for alpha in ["1", "-1", "2", "3/5"] {
            cases.push((spec(23, k, alpha), 2));
        }
    }
    for k in [2u64, 3, 4] {
        for alpha in ["1", "2", "5", "8"] {
            cases.push((spec(3, k, alpha), 3));
        }
    }
    let mut checked = 0;
    let mut failures = Vec::new();
    for (s, m) in &cases {
        let c = crosscheck_cm(s, *m, r).unwrap();
        checked += c.checked;
        if c.mismatches > 0 || c.checked == 0 {
            failures.push(format!(
                "{s} m={m}: {} mismatches, first {:?}",
                c.mismatches, c.first_mismatch
            ));
        }
    }
    let (fast, time) = within(Duration::from_secs(60), t);
    let mut out: Vec<Line> = failures
        .iter()
        .map(|f| line("1b", false, f.clone()))
        .collect();
    out.push(line(
        "1b",
        failures.is_empty() && fast,
        format!(
            "predicted vs computed m-th power symbol, {} forms, {checked} primes < 1e5; {time}",
            cases.len()
        ),
    ));
    out
}

fn identity_1c() -> Vec<Line> {
    let t = Instant::now();
    // 40 sampled primes for each (field, m)
    let configs = [(7u64, 3u64), (1, 3), (11, 3), (3, 5), (2, 5)];
    let mut checked = 0;
    let mut bad = Vec::new();
    for (i, &(d, m)) in configs.iter().enumerate() {
        let (e, form) = cm_curve_form(d).unwrap();
        let primes =
            sample_inertia_primes(&e, form.field(), m, range(5, 10_000), 40, 1000 + i as u64);
        assert_eq!(primes.len(), 40, "d={d} m={m}: not enough valid primes");
        let results: Vec<_> = primes
            .par_iter()
            .map(|&p| check_inertia(&e, form.field(), m, p).unwrap())
            .collect();
        checked += results.len();
        bad.extend(
            results
                .iter()
                .filter(|c| !c.agrees)
                .map(|c| (d, m, c.profile.p)),
        );
    }
    // Frobenius of y^2 = x^3 - x at 13 is 3 + 2i: (3 + 2i)^2 = 5 + 12i and
    // (3 + 2i)^4 = -119 + 120i, so #E(F_169) = 170 - 10 and #E(F_13^4) = 28562 + 238
    let x3x = cm_curve(1).unwrap();
    let brute = extension_count_bruteforce(&x3x, 13, 2).unwrap();
    let exact = extension_count_exact(&x3x, 13, 4).unwrap();
    let (fast, time) = within(Duration::from_secs(60), t);
    vec![
        line("1c", bad.is_empty() && checked == 200 && fast, format!(
            "inertia degree vs p | #E(F_p^n) on {checked} sampled triples with p < 1e4, {} disagreements{}; {time}",
            bad.len(),
            bad.first().map_or_else(String::new, |b| format!(" (first {b:?})"))
        )),
        line("1c", brute == 160, format!("#E(F_169) for y^2 = x^3 - x by enumeration: {brute} (want 160)")),
        line("1c", exact == BigInt::from(28800), format!("#E(F_13^4) for y^2 = x^3 - x: {exact} (want 28800)")),
    ]
}

/// Split primes below `hi` where `ap_cm(form)` differs from the naive count on `e`.
fn cm_vs_curve(form: &CMFormSpec, e: &EllipticCurve, hi: u64) -> (usize, Vec<(u64, i128, i64)>) {
    let rows: Vec<(u64, i128, i64)> = sieve_range(range(5, hi))
        .into_par_iter()
        .filter(|&p| e.has_good_reduction(p))
        .filter_map(|p| match ap_cm(form, p).unwrap() {
            CmValue::Value(v) => Some((p, v, ap_elliptic_naive(e, p).unwrap())),
            _ => None,
        })
        .collect();
    let n = rows.len();
    (
        n,
        rows.into_iter()
            .filter(|(_, a, b)| *a != *b as i128)
            .collect(),
    )
}

fn identity_1d() -> Vec<Line> {
    let t = Instant::now();
    let mut out = Vec::new();
    // Literal reading: alpha = 1 for both fields. The psi normalisation used
    // throughout makes alpha = 1 the quadratic twist by the unit eps, so this
    // is reported but not asserted; the corrected pairing below is.
    for d in [1u64, 3] {
        let e = cm_curve(d).unwrap();
        let (n, bad) = cm_vs_curve(&spec(d, 2, "1"), &e, 10_000);
        out.push(info(
            "1d",
            bad.is_empty(),
            format!(
                "literal alpha=1, d={d} vs [{e}]: {}/{n} split primes differ{} (not asserted; see README)",
                bad.len(),
                bad.first().map_or_else(String::new, |(p, a, b)| format!(", first p={p}: form {a}, curve {b}"))
            ),
        ));
    }
    for d in [1u64, 3, 2, 7, 11, 19, 43, 67, 163] {
        let (e, form) = cm_curve_form(d).unwrap();
        let (n, bad) = cm_vs_curve(&form, &e, 10_000);
        out.push(line(
            "1d",
            bad.is_empty() && n > 0,
            format!(
                "{form} vs naive count on [{e}]: {n} split primes < 1e4, {} differ",
                bad.len()
            ),
        ));
    }
    let curves = [
        curve([0, -1, 1, -10, -20]),
        curve([0, 0, 0, -1, 0]),
        curve([0, 0, 1, 0, -7]),
        curve([1, -1, 0, -2, -1]),
        curve([0, 0, 1, -1, 0]),
    ];
    for e in &curves {
        let bad: Vec<u64> = sieve_range(range(1000, 100_001))
            .into_par_iter()
            .filter(|&p| e.has_good_reduction(p))
            .filter(|&p| ap_elliptic_bsgs(e, p).unwrap() != ap_elliptic_naive(e, p).unwrap())
            .collect();
        out.push(line(
            "1d",
            bad.is_empty(),
            format!("BSGS = naive on [1e3, 1e5] for [{e}]: {} differ", bad.len()),
        ));
    }
    let (fast, time) = within(Duration::from_secs(300), t);
    out.push(line("1d", fast, format!("runtime {time}")));
    out
}

fn identity_1e() -> Vec<Line> {
    let r = range(5, 1_000_000);
    [(spec(3, 2, "8"), 3u64), (spec(7, 4, "5"), 3)]
        .into_iter()
        .map(|(s, m)| {
            let rep = estimate_delta(&ApProvider::Cm(s), m, r, &CebotarevFilter::All).unwrap();
            let pred = predict_delta(&s, m).unwrap();
            line(
                "1e",
                rep.numerator == rep.denominator
                    && rep.denominator > 0
                    && *pred.value.numer() == *pred.value.denom(),
                format!(
                    "{s} m={m}: {}/{} (predicted {pred})",
                    rep.numerator, rep.denominator
                ),
            )
        })
        .collect()
}

fn band(id: &'static str, s: CMFormSpec, m: u64, want: (u64, u64), tol: f64) -> Line {
    let t = Instant::now();
    let rep = estimate_delta(
        &ApProvider::Cm(s),
        m,
        range(5, 1_000_000),
        &CebotarevFilter::All,
    )
    .unwrap();
    let pred = predict_delta(&s, m).unwrap();
    let emp = rep.ratio_f64().unwrap();
    let target = want.0 as f64 / want.1 as f64;
    let exact_case = want.0 == want.1;
    let ok = (*pred.value.numer(), *pred.value.denom()) == want
        && if exact_case {
            rep.numerator == rep.denominator
        } else {
            (emp - target).abs() <= tol
        };
    let (fast, time) = within(Duration::from_secs(120), t);
    line(
        id,
        ok && fast,
        format!(
            "{s} m={m}: {}/{} = {emp:.4}, want {}/{} +- {tol}; predicted {pred}; {time}",
            rep.numerator, rep.denominator, want.0, want.1
        ),
    )
}

fn statistical_2() -> Vec<Line> {
    vec![
        band("2a", spec(7, 2, "1"), 2, (3, 4), 0.02),
        band("2a", spec(7, 2, "-1"), 2, (1, 4), 0.02),
        band("2a", spec(7, 3, "1"), 2, (1, 1), 0.02),
        band("2a", spec(1, 2, "2"), 2, (1, 2), 0.02),
        band("2a", spec(7, 2, "5"), 2, (1, 2), 0.02),
        band("2b", spec(3, 2, "2"), 3, (5, 9), 0.02),
        band("2c", spec(7, 5, "2"), 4, (1, 2), 0.02),
        band("2c", spec(7, 5, "5"), 4, (3, 4), 0.02),
    ]
}

fn non_cm_3() -> Vec<Line> {
    let t = Instant::now();
    let e = ApProvider::Elliptic(curve([0, -1, 1, -10, -20]));
    let ms: Vec<u64> = (2..=10).collect();
    let reps = estimate_many(&e, &ms, range(1_000_000, 2_000_000), &CebotarevFilter::All).unwrap();
    let mut out: Vec<Line> = reps
        .iter()
        .map(|r| {
            let emp = r.ratio_f64().unwrap();
            let ok = (emp - 1.0 / r.m as f64).abs() <= 0.03;
            line(
                "3",
                ok,
                format!(
                    "X0(11) m={}: {}/{} = {emp:.4}, want 1/{} +- 0.03",
                    r.m, r.numerator, r.denominator, r.m
                ),
            )
        })
        .collect();
    let (fast, time) = within(Duration::from_secs(600), t);
    out.push(line("3", fast, format!("runtime {time}")));
    out
}

fn delta_4() -> Vec<Line> {
    let t = Instant::now();
    let n = 100_000usize;
    let tau = tau_series(n).unwrap();
    let primes = sieve_range(range(2, n as u64 + 1));
    // tau(mn) = tau(m) tau(n) for coprime m, n
    let mult_bad = (2..=n / 2)
        .into_par_iter()
        .flat_map_iter(|a| (a + 1..=n / a).map(move |b| (a, b)))
        .filter(|&(a, b)| powres::arith::gcd(a as u64, b as u64) == 1)
        .filter(|&(a, b)| tau.get(a * b).unwrap() != tau.get(a).unwrap() * tau.get(b).unwrap())
        .count();
    // tau(p^{r+1}) = tau(p) tau(p^r) - p^11 tau(p^{r-1})
    let mut hecke_checked = 0;
    let mut hecke_bad = 0;
    for &p in primes.iter().take_while(|&&p| p * p <= n as u64) {
        let p = p as usize;
        let p11 = ethnum::I256::from(p as i64).pow(11);
        let mut q = p;
        while q * p <= n {
            let prev = if q == p {
                ethnum::I256::ONE
            } else {
                tau.get(q / p).unwrap()
            };
            hecke_checked += 1;
            if tau.get(q * p).unwrap() != tau.get(p).unwrap() * tau.get(q).unwrap() - p11 * prev {
                hecke_bad += 1;
            }
            q *= p;
        }
    }
    // |tau(p)| <= 2 p^{11/2}, i.e. tau(p)^2 <= 4 p^11
    let deligne_bad = primes
        .iter()
        .filter(|&&p| {
            let t = tau.get(p as usize).unwrap();
            t * t > ethnum::I256::from(4) * ethnum::I256::from(p as i64).pow(11)
        })
        .count();
    let (fast, time) = within(Duration::from_secs(120), t);
    let mut out = vec![
        line("4", mult_bad == 0, format!("tau to 1e5: multiplicativity on coprime pairs, {mult_bad} failures")),
        line("4", hecke_bad == 0 && hecke_checked > 0, format!("tau Hecke recursion at prime powers: {hecke_checked} checked, {hecke_bad} failures")),
        line("4", deligne_bad == 0, format!("tau Deligne bound at {} primes: {deligne_bad} failures", primes.len())),
    ];
    let delta = ApProvider::Delta(std::sync::Arc::new(tau));
    let reps = estimate_many(
        &delta,
        &[2, 3, 4, 5],
        range(10_000, 100_000),
        &CebotarevFilter::All,
    )
    .unwrap();
    for r in reps {
        let emp = r.ratio_f64().unwrap();
        out.push(info(
            "4",
            (emp - 1.0 / r.m as f64).abs() <= 0.1,
            format!(
                "Delta m={}: {}/{} = {emp:.4}, conjectural 1/{} +- 0.1 (information only)",
                r.m, r.numerator, r.denominator, r.m
            ),
        ));
    }
    out.push(line("4", fast, format!("runtime {time}")));
    out
}

/// `(D/n)` for `D = 1 (mod 4)` and any `n >= 1`.
fn kronecker(disc: i64, n: u64) -> i64 {
    let tz = n.trailing_zeros();
    let two = if disc.rem_euclid(8) == 1 { 1 } else { -1 };
    let odd = jacobi(disc, n >> tz) as i64;
    odd * if tz.is_multiple_of(2) { 1 } else { two }
}

fn infrastructure_5() -> Vec<Line> {
    let mut out = Vec::new();
    for (disc, want) in [(-23i64, 3u64), (-47, 5), (-71, 7)] {
        // Dirichlet: h(D) = -(1/|D|) sum_{a < |D|} (D/a) a for D < -4
        let n = disc.unsigned_abs();
        let s: i64 = (1..n).map(|a| kronecker(disc, a) * a as i64).sum();
        let analytic = (-s / n as i64) as u64;
        let h = class_number(disc);
        line(
            "5",
            h == want && analytic == want,
            format!("h({disc}) = {h}, analytic formula {analytic}, want {want}"),
        )
        .push_to(&mut out);
    }
    let sieved = sieve_range(range(0, 1_000_000)).len();
    let trial = (0..1_000_000u64)
        .into_par_iter()
        .filter(|&n| is_trial_prime(n))
        .count();
    let mr = (0..1_000_000u64)
        .into_par_iter()
        .filter(|&n| is_prime(n))
        .count();
    line(
        "5",
        sieved == 78498 && trial == 78498 && mr == 78498,
        format!("pi(1e6): sieve {sieved}, trial division {trial}, Miller-Rabin {mr}"),
    )
    .push_to(&mut out);
    let run = |threads: usize| -> (Vec<DensityReport>, Vec<DensityReport>) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let cm = ApProvider::Cm(spec(7, 5, "3/5"));
            let ell = ApProvider::Elliptic(curve([0, -1, 1, -10, -20]));
            let f = CebotarevFilter::cubic([1, 0, 0, -2], [0, 1]).unwrap();
            (
                estimate_many(&cm, &[2, 3, 4, 5], range(5, 1_000_000), &f).unwrap(),
                estimate_many(&ell, &[2, 3, 4], range(5, 300_000), &CebotarevFilter::All).unwrap(),
            )
        })
    };
    let (a, b) = (run(1), run(4));
    line(
        "5",
        a == b,
        "density reports identical under 1 and 4 worker threads",
    )
    .push_to(&mut out);
    out
}

fn is_trial_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

impl Line {
    fn push_to(self, v: &mut Vec<Line>) {
        v.push(self);
    }
}

/// X0(11) over primes p = 1 (mod m) in [1e8, 2e8]. Neither endpoint
/// is prime, so the closed-open convention cannot shift any count. Expect
/// hours on a single core.
fn x011_long() -> Vec<Line> {
    let table: [(u64, u64, u64); 9] = [
        (2, 2662953, 5317482),
        (3, 888792, 2658461),
        (4, 667722, 2658316),
        (5, 266666, 1329469),
        (6, 446913, 2658461),
        (7, 127203, 886591),
        (8, 168427, 1329053),
        (9, 99178, 886298),
        (10, 133116, 1329469),
    ];
    let e = ApProvider::Elliptic(curve([0, -1, 1, -10, -20]));
    let ms: Vec<u64> = table.iter().map(|r| r.0).collect();
    let reps = estimate_many(
        &e,
        &ms,
        range(100_000_000, 200_000_001),
        &CebotarevFilter::All,
    )
    .unwrap();
    reps.iter()
        .zip(table)
        .map(|(r, (m, num, den))| {
            line(
                "long",
                (r.numerator, r.denominator) == (num, den),
                format!(
                    "X0(11) m={m} on [1e8, 2e8]: {}/{}, reference {num}/{den}",
                    r.numerator, r.denominator
                ),
            )
        })
        .collect()
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let long = args
        .iter()
        .any(|a| a == "--ignored" || a == "--include-ignored");
    let only_long = args.iter().any(|a| a == "--ignored");
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    let selected = |id: &str| filters.is_empty() || filters.iter().any(|f| id.contains(f.as_str()));

    let mut suites: Vec<Suite> = vec![
        ("1a", identity_1a),
        ("1b", identity_1b),
        ("1c", identity_1c),
        ("1d", identity_1d),
        ("1e", identity_1e),
        ("2", statistical_2),
        ("3", non_cm_3),
        ("4", delta_4),
        ("5", infrastructure_5),
    ];
    if only_long {
        suites.clear();
    }
    if long {
        suites.push(("long", x011_long));
    }
    let mut failed = 0;
    let mut run = 0;
    for (id, suite) in suites {
        if !selected(id) {
            continue;
        }
        for l in suite() {
            let tag = match (l.pass, l.asserted) {
                (true, _) => "PASS",
                (false, true) => "FAIL",
                (false, false) => "FAIL (informational)",
            };
            println!("{tag} [{}] {}", l.id, l.detail);
            run += 1;
            if !l.pass && l.asserted {
                failed += 1;
            }
        }
    }
    println!("acceptance: {run} lines, {failed} asserted failures");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
