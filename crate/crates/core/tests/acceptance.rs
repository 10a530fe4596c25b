//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::Instant;

use snb::bayes::{self, BetaPrior};
use snb::commands;
use snb::dist::SnbParams;
use snb::oracle::{enumerate_conditional_law, enumerate_law, quadrature};
use snb::sampler::{self, Endpoint, SeededGenerator};
use snb::service::{self, replay_log, ResponseModel, TrialStatus, TrialStore};
use snb::special::log_beta;
use snb::SnbError;

type Verdict = Result<String, String>;

/// C(n, k) in exact integer arithmetic.
fn choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

fn pow(x: f64, e: u64) -> f64 {
    x.powi(e as i32)
}

/// P[Binomial(n, p) >= s] by direct summation of the binomial pmf.
fn binomial_upper_tail(n: u64, s: u64, p: f64) -> f64 {
    (s..=n).map(|j| choose(n, j) * pow(p, j) * pow(1.0 - p, n - j)).sum()
}

/// P[first success number s arrives on trial k].
fn negbin_pmf(k: u64, s: u64, p: f64) -> f64 {
    if k < s {
        return 0.0;
    }
    choose(k - 1, s - 1) * pow(p, s) * pow(1.0 - p, k - s)
}

fn params(p: f64, s: u64, t: u64) -> SnbParams {
    SnbParams::new(p, s, t).unwrap()
}

fn hundredths() -> impl Iterator<Item = f64> {
    (0..=100).map(|i| i as f64 / 100.0)
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for p in [0.1, 0.25, 0.5, 0.8] {
        for s in 1..=16u64 {
            for t in 1..=(17 - s) {
                let d = params(p, s, t);
                let law = enumerate_law(&d).map_err(|e| e.to_string())?;
                for k in 0..=s + t {
                    worst = worst.max((d.pmf(k) - law.pmf(k)).abs());
                }
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let detail = format!("{cases} designs, max |closed - enumerated| = {worst:e}, {elapsed:.2} s");
    if worst <= 1e-12 && elapsed < 10.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn normalization() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut designs: Vec<(u64, u64)> = (1..=12).flat_map(|s| (1..=12).map(move |t| (s, t))).collect();
    designs.extend([(40, 60), (150, 90), (500, 700), (1000, 1000)]);
    for p in hundredths() {
        for &(s, t) in &designs {
            let total: f64 = params(p, s, t).pmf_vec().iter().sum();
            worst = worst.max((total - 1.0).abs());
            cases += 1;
        }
    }
    let detail = format!("{cases} (p, s, t) cases, max |sum - 1| = {worst:e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn success_identity() -> Verdict {
    let mut worst: f64 = 0.0;
    for p in hundredths() {
        for s in 1..=12 {
            for t in 1..=12 {
                let d = params(p, s, t);
                let tail = binomial_upper_tail(s + t - 1, s, p);
                worst = worst.max((d.success_probability() - tail).abs());
                let from_split: f64 = d.support_iter().map(|k| d.endpoint_split(k).success_mass).sum();
                worst = worst.max((from_split - tail).abs());
            }
        }
    }
    let trial = params(0.2, 7, 11).success_probability();
    let tail = binomial_upper_tail(17, 7, 0.2);
    let detail = format!("max |success - binomial tail| = {worst:e}; SNB(0.2, 7, 11) success = {trial:.15} (tail {tail:.15})");
    if worst <= 1e-12 && trial <= 0.1 && (trial - tail).abs() <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn motivating_example() -> Verdict {
    let d = params(0.2, 7, 11);
    let support_ok = d.support() == (7, 17)
        && d.support_iter().all(|k| d.pmf(k) > 0.0)
        && d.pmf(6) == 0.0
        && d.pmf(18) == 0.0;
    let m0 = params(0.0, 7, 11).moments();
    let m1 = params(1.0, 7, 11).moments();
    let endpoints_ok = (m0.mean, m0.variance) == (11.0, 0.0) && (m1.mean, m1.variance) == (7.0, 0.0);

    let grid: Vec<f64> = hundredths().collect();
    let var: Vec<f64> = grid.iter().map(|&p| params(p, 7, 11).moments().variance).collect();
    let minima: Vec<f64> = (1..grid.len() - 1)
        .filter(|&i| grid[i] > 0.1 && grid[i] < 0.4 && var[i] <= var[i - 1] && var[i] <= var[i + 1])
        .map(|i| grid[i])
        .collect();
    let i10 = 10;
    let i40 = 40;
    let increasing = (i10..i40).all(|i| var[i + 1] > var[i]);
    let flattest = (i10..i40)
        .min_by(|&a, &b| (var[a + 1] - var[a]).total_cmp(&(var[b + 1] - var[b])))
        .map(|i| grid[i])
        .unwrap();
    let saddle = if minima.is_empty() {
        format!(
            "no interior local minimum of variance in (0.1, 0.4): variance {} from {:.4} to {:.4}, flattest step at p = {flattest:.2}",
            if increasing { "strictly increases" } else { "varies" },
            var[i10],
            var[i40]
        )
    } else {
        format!("interior local minima of variance at p = {minima:?}")
    };
    let detail = format!(
        "support [7, 17] {}; moments at p=0,1 {}; {saddle}",
        if support_ok { "ok" } else { "WRONG" },
        if endpoints_ok { "ok" } else { "WRONG" }
    );
    if support_ok && endpoints_ok && !minima.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mgf() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut at_zero: f64 = 0.0;
    let mut rejected = 0;
    let fixtures = [params(0.2, 7, 11), params(0.5, 3, 3), params(0.7, 4, 9)];
    for d in &fixtures {
        let law = enumerate_law(d).map_err(|e| e.to_string())?;
        let bound = (1.0 / d.p()).ln().min((1.0 / d.q()).ln());
        for i in 0..20 {
            let x = -2.0 + (0.98 * bound + 2.0) * i as f64 / 19.0;
            let direct: f64 = law.pmf_by_k.iter().map(|(&k, &m)| (k as f64 * x).exp() * m).sum();
            let closed = d.mgf(x).map_err(|e| format!("x = {x}: {e}"))?;
            worst = worst.max(((closed - direct) / direct).abs());
        }
        at_zero = at_zero.max((d.mgf(0.0).map_err(|e| e.to_string())? - 1.0).abs());
        for x in [bound, bound + 0.1] {
            if matches!(d.mgf(x), Err(SnbError::Domain(_))) {
                rejected += 1;
            }
        }
    }
    let detail = format!(
        "60 points, max relative error {worst:e}; |mgf(0) - 1| <= {at_zero:e}; {rejected}/6 out-of-domain points rejected"
    );
    if worst <= 1e-10 && at_zero <= 1e-12 && rejected == 6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn negative_binomial_limit() -> Verdict {
    let (p, s) = (0.3, 2);
    let ts = [20u64, 50, 100, 500];
    // largest pointwise gap to the negative binomial pmf over k in [s, s + t - 1]
    let whole: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let d = params(p, s, t);
            (s..=s + t - 1).map(|k| (d.pmf(k) - negbin_pmf(k, s, p)).abs()).fold(0.0, f64::max)
        })
        .collect();
    let head: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let d = params(p, s, t);
            (0..=5).map(|j| (d.pmf(s + j) - negbin_pmf(s + j, s, p)).abs()).fold(0.0, f64::max)
        })
        .collect();
    let decreasing = whole.windows(2).all(|w| w[1] < w[0]);
    let head_ok = head.windows(2).all(|w| w[1] <= w[0] + 1e-16) && head[3] <= 1e-6;
    let sci = |v: &[f64]| v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ");
    let detail = format!(
        "sup-norm deviation over t = {ts:?}: [{}]; first six masses: [{}]",
        sci(&whole),
        sci(&head)
    );
    if decreasing && whole[3] <= 1e-6 && head_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn beta_density(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    let norm = log_beta(a, b).unwrap();
    move |x: f64| ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - norm).exp()
}

fn bayesian_layer() -> Verdict {
    let err = |e: SnbError| e.to_string();
    let mut sum_gap: f64 = 0.0;
    for (a, b) in [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0), (0.3, 4.0), (10.0, 1.0)] {
        let prior = BetaPrior::new(a, b).map_err(err)?;
        for (s, t) in [(7, 11), (3, 3), (1, 5), (12, 4)] {
            let total: f64 = (s.min(t)..=s + t - 1)
                .map(|k| bayes::predictive_pmf(&prior, s, t, k))
                .sum::<Result<f64, _>>()
                .map_err(err)?;
            sum_gap = sum_gap.max((total - 1.0).abs());
        }
    }

    let mut quad_gap: f64 = 0.0;
    for (a, b) in [(0.5, 0.5), (1.0, 1.0), (2.0, 3.0)] {
        let prior = BetaPrior::new(a, b).map_err(err)?;
        for (s, t) in [(2u64, 2u64), (3, 4), (4, 2)] {
            for k in s.min(t)..=s + t - 1 {
                let density = beta_density(a, b);
                let likelihood = |p: f64| {
                    let mut m = 0.0;
                    if k >= s {
                        m += choose(k - 1, s - 1) * pow(p, s) * pow(1.0 - p, k - s);
                    }
                    if k >= t {
                        m += choose(k - 1, t - 1) * pow(1.0 - p, t) * pow(p, k - t);
                    }
                    m
                };
                let integral = quadrature(|p| density(p) * likelihood(p), 1e-13).map_err(err)?;
                let closed = bayes::predictive_pmf(&prior, s, t, k).map_err(err)?;
                quad_gap = quad_gap.max((closed - integral).abs());
            }
        }
    }

    let mut hyper_gap: f64 = 0.0;
    for (a, b) in [(1.0, 1.0), (2.0, 3.0), (4.0, 1.0), (5.0, 5.0)] {
        let prior = BetaPrior::new(a, b).map_err(err)?;
        for (s, t) in [(7, 11), (3, 3), (2, 2), (5, 2)] {
            for k in s.min(t)..=s + t - 1 {
                let beta_form = bayes::predictive_pmf(&prior, s, t, k).map_err(err)?;
                let hyper = bayes::predictive_pmf_hypergeometric(&prior, s, t, k).map_err(err)?;
                hyper_gap = hyper_gap.max((beta_form - hyper).abs());
            }
        }
    }

    let post = bayes::posterior_given_endpoint(&BetaPrior::jeffreys(), 7, 11, 15, Endpoint::SuccessBoundary).map_err(err)?;
    let exact = (post.a, post.b) == (7.5, 8.5);
    let detail = format!(
        "|sum - 1| <= {sum_gap:e}; |closed - quadrature| <= {quad_gap:e}; |beta - hypergeometric| <= {hyper_gap:e}; Jeffreys k=15 success -> Beta({}, {})",
        post.a, post.b
    );
    if sum_gap <= 1e-12 && quad_gap <= 1e-9 && hyper_gap <= 1e-12 && exact {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn interim_law() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut check = |d: &SnbParams, s_obs: u64, t_obs: u64| -> Result<(), String> {
        let reduced = d.conditional_remaining(s_obs, t_obs).map_err(|e| e.to_string())?;
        let law = enumerate_conditional_law(d, s_obs, t_obs).map_err(|e| e.to_string())?;
        for k in 0..=reduced.max_trials() + 1 {
            worst = worst.max((reduced.pmf(k) - law.pmf(k)).abs());
        }
        worst = worst.max((reduced.success_probability() - law.success_prob).abs());
        cases += 1;
        Ok(())
    };
    for d in [params(0.3, 3, 3), params(0.5, 4, 6), params(0.8, 5, 5), params(0.25, 6, 6), params(0.2, 7, 10)] {
        for s_obs in 0..d.s() {
            for t_obs in 0..d.t() {
                check(&d, s_obs, t_obs)?;
            }
        }
    }
    let trial = params(0.2, 7, 11);
    for (s_obs, t_obs) in [(0, 0), (3, 5), (6, 8), (6, 10)] {
        check(&trial, s_obs, t_obs)?;
    }
    let detail = format!("{cases} interim states, max |reduced - enumerated conditional| = {worst:e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sampler_criterion() -> Verdict {
    let d = params(0.2, 7, 11);
    let n = 100_000;
    let mut gen = SeededGenerator::new(42);
    let samples = sampler::sample_n(&d, n, &mut gen).map_err(|e| e.to_string())?;
    let valid = samples.iter().all(|x| x.is_valid_for(&d));
    let tv = sampler::total_variation(&sampler::empirical_pmf(&samples).map_err(|e| e.to_string())?, &d);
    let frac = sampler::success_fraction(&samples);
    let gap = (frac - d.success_probability()).abs();
    let first = commands::simulate_table(&d, n, 42).map_err(|e| e.to_string())?.to_csv();
    let second = commands::simulate_table(&d, n, 42).map_err(|e| e.to_string())?.to_csv();
    let identical = first == second;
    let detail = format!(
        "n = {n}, seed 42: TV = {tv:.5}, success fraction {frac:.5} vs {:.5} (gap {gap:.5}), reruns {}",
        d.success_probability(),
        if identical { "byte-identical" } else { "DIFFER" }
    );
    if valid && tv <= 0.01 && gap <= 0.005 && identical {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli_and_service() -> Verdict {
    let golden_failures: Vec<String> = common::GOLDEN_CASES
        .iter()
        .filter_map(|(name, args)| common::check_golden(name, args).err())
        .collect();
    if !golden_failures.is_empty() {
        return Err(golden_failures.join("; "));
    }

    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = Arc::new(TrialStore::open(dir.path()).map_err(|e| e.to_string())?);
    let app = service::router(store.clone());
    let (status, enrolled, id) = runtime.block_on(async {
        use axum::body::Body;
        use axum::http::Request;
        use http_body_util::BodyExt;
        use tower::ServiceExt;

        let send = |method: &str, uri: String, body: String| {
            let req = Request::builder()
                .method(method)
                .uri(uri)
                .header("content-type", "application/json")
                .body(Body::from(body))
                .unwrap();
            let app = app.clone();
            async move {
                let resp = app.oneshot(req).await.unwrap();
                let bytes = resp.into_body().collect().await.unwrap().to_bytes();
                serde_json::from_slice::<service::InterimReport>(&bytes).unwrap()
            }
        };
        let created = send("POST", "/api/trials".into(), r#"{"s":7,"t":11,"prior":{"alpha":0.5,"beta":0.5}}"#.into()).await;
        let mut last = created.clone();
        for o in common::motivating_outcomes() {
            last = send("POST", format!("/api/trials/{}/outcomes", created.id), format!(r#"{{"response":{o}}}"#)).await;
        }
        (last.status, last.enrolled, created.id)
    });
    if (status, enrolled) != (TrialStatus::StoppedSuccess, 15) {
        return Err(format!("motivating sequence ended {status:?} at {enrolled}"));
    }

    let fixed = store.create(3, 4, ResponseModel::Fixed { p: 0.35 }).map_err(|e| e.to_string())?;
    for o in [false, true, false] {
        store.record(&fixed.id, o).map_err(|e| e.to_string())?;
    }
    store.undo(&fixed.id).map_err(|e| e.to_string())?;
    store.record(&fixed.id, true).map_err(|e| e.to_string())?;
    let mut replayed = 0;
    for trial in [&id, &fixed.id] {
        let live = store.state(trial).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(dir.path().join(format!("{trial}.log"))).map_err(|e| e.to_string())?;
        let from_log = replay_log(&text).map_err(|e| e.to_string())?.report().map_err(|e| e.to_string())?;
        let reopened = TrialStore::open(dir.path()).map_err(|e| e.to_string())?.state(trial).map_err(|e| e.to_string())?;
        if from_log != live || reopened != live {
            return Err(format!("trial {trial}: replayed report differs from live report"));
        }
        replayed += 1;
    }
    Ok(format!(
        "{} golden files match; motivating sequence -> StoppedSuccess at enrollment 15; {replayed} event logs replay to identical reports",
        common::GOLDEN_CASES.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("normalization", normalization),
        ("success probability identity", success_identity),
        ("motivating example", motivating_example),
        ("mgf", mgf),
        ("negative binomial limit", negative_binomial_limit),
        ("bayesian layer", bayesian_layer),
        ("interim law", interim_law),
        ("sampler", sampler_criterion),
        ("cli and service contract", cli_and_service),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
