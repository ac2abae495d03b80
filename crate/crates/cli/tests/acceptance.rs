//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use derivlab::bundled::SCENARIOS;
use derivlab::{parse_element, parse_scenario, parse_tower_str, run_scenario, RunOptions};
use derivlab_core::calculus::{
    check_trace, decompose_polynomial, delta_multi, symmetrize_power_pair, trace_to_multiadditive, MultiAdditiveMap,
    PointFunction,
};
use derivlab_core::fields::{rat, ratio, FieldElement, MobiusCoeffs, Rational, TowerField};
use derivlab_core::maps::{derivation_extend, matrix_map, quadratic_conjugation, AdditiveMap};
use derivlab_core::report::Status;
use derivlab_core::samples::SampleSet;
use derivlab_core::theorems::{
    check_linearity_theorem, check_power_rule, check_star, check_triangle, chi_transform_identity,
    composite_power_identity, phi_power_function, verify_mobius_forward, verify_phi_power, NONLINEAR_HOMOMORPHISM_NOTE,
};
use derivlab_core::Error;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn tower(text: &str) -> TowerField {
    parse_tower_str(text).expect("tower descriptor")
}

fn d_t(k: &TowerField) -> AdditiveMap {
    derivation_extend(k, &[("t", k.one())]).expect("D(t) = 1")
}

fn id_plus(f: &AdditiveMap, a: i64) -> AdditiveMap {
    f.plus(&AdditiveMap::scaled_identity(rat(a)))
}

fn matrices() -> Vec<MobiusCoeffs> {
    [(1, 0, 0, 1), (0, 1, 1, 0), (1, 1, 1, 2), (2, 3, 1, 1)]
        .iter()
        .map(|&(a, b, c, d)| MobiusCoeffs::from_i64(a, b, c, d).expect("invertible"))
        .collect()
}

const EXPONENTS: [i64; 4] = [1, 2, 3, -1];

fn excluded(m: &MobiusCoeffs, n: i64) -> bool {
    (m.c() == &rat(0) && n == 1) || (m.d() == &rat(0) && n == -1)
}

fn criterion_1() -> Outcome {
    let mut checks = 0;
    for desc in ["Q(t)", "Q(t, s | s^2 = t)"] {
        let k = tower(desc);
        let d = d_t(&k);
        let samples = SampleSet::default_for(&k);
        ensure!(samples.len() == 20, "{desc}: default sample set has {} elements", samples.len());
        for kk in (-5..=5).filter(|&x| x != 0) {
            let r = ok(check_power_rule(&d, kk, &samples), "power rule")?;
            ensure!(r.passed(), "{desc}, k={kk}: {:?}", r.witness);
            checks += 1;
        }
    }
    Ok(format!("{checks} power-rule checks"))
}

fn criterion_2() -> Outcome {
    let mut evaluated = 0;
    for (desc, gen) in [("Q(sqrt2 | x^2 - 2)", "sqrt2"), ("Q(alpha | x^3 - 2)", "alpha")] {
        let k = tower(desc);
        let d = ok(derivation_extend(&k, &[]), "derivation_extend")?;
        let xs = SampleSet::random(&k, 50, seed_of(desc));
        ensure!(xs.len() == 50, "{desc}: only {} random elements", xs.len());
        for x in xs.iter() {
            let v = ok(d.eval(x), "eval")?;
            ensure!(v.is_zero(), "{desc}: D({x}) = {v}");
            evaluated += 1;
        }
        let forced = derivation_extend(&k, &[(gen, k.one())]);
        ensure!(matches!(forced, Err(Error::ForcedImage(_))), "{desc}: supplied image for {gen} was accepted");
    }
    Ok(format!("{evaluated} elements map to 0"))
}

fn seed_of(desc: &str) -> u64 {
    desc.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn criterion_3() -> Outcome {
    let k = tower("Q(t)");
    let d = d_t(&k);
    let d2 = d.clone();
    let big_b = ok(
        MultiAdditiveMap::new("B", 2, true, move |xs| {
            let (x, y) = (&xs[0], &xs[1]);
            x.mul(&d2.eval(y)?)?.add(&y.mul(&d2.eval(x)?)?)
        }),
        "B",
    )?;
    let b = big_b.trace();
    let pool = SampleSet::random(&k, 60, 3);
    let basepoints: Vec<FieldElement> = SampleSet::random(&k, 5, 33).elements().to_vec();
    ensure!(basepoints.len() == 5, "need 5 basepoints");
    let xs = pool.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(333);
    let pick = |rng: &mut ChaCha8Rng| xs[rng.gen_range(0..xs.len())].clone();
    for _ in 0..100 {
        let (y1, y2, y3) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        // B computed directly from D and field operations
        let expected = ok(y1.mul(&d.eval(&y2).unwrap()), "mul")?.add(&y2.mul(&d.eval(&y1).unwrap()).unwrap()).unwrap();
        let twice = expected.scale(&rat(2));
        let delta2 = delta_multi(&b, &[y1.clone(), y2.clone()]);
        let delta3 = delta_multi(&b, &[y1.clone(), y2.clone(), y3.clone()]);
        for x in &basepoints {
            let v = ok(delta2.eval(x), "delta")?;
            ensure!(v == twice, "D_(y1,y2) b({x}) = {v}, want {twice} (y1={y1}, y2={y2})");
            let z = ok(delta3.eval(x), "delta")?;
            ensure!(z.is_zero(), "D_(y1,y2,y3) b({x}) = {z}");
        }
        let recovered = ok(trace_to_multiadditive(&b, 2, &[y1.clone(), y2.clone()], &basepoints), "recover")?;
        ensure!(recovered == expected, "recovered {recovered}, want {expected}");
    }
    Ok("100 tuples x 5 basepoints".into())
}

fn additive_pool(k: &TowerField) -> Vec<AdditiveMap> {
    let t = k.generator("t").unwrap();
    let d = d_t(k);
    let d2 = derivation_extend(k, &[("t", t.mul(&t).unwrap().add_rational(&rat(1)))]).unwrap();
    vec![
        AdditiveMap::identity(),
        d.clone(),
        d2,
        AdditiveMap::Multiplication(t.clone()),
        AdditiveMap::Multiplication(t.add_rational(&rat(1)).inv().unwrap()),
        AdditiveMap::scaled_identity(ratio(-3, 2)),
        d.plus(&AdditiveMap::Multiplication(t)),
    ]
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5));
        if r != rat(0) {
            return r;
        }
    }
}

/// c·a₁(x)·…·a_k(x), the trace of the symmetrization of a product of additive maps.
fn product_trace(k: &TowerField, c: Rational, maps: Vec<AdditiveMap>) -> PointFunction {
    let one = k.one();
    PointFunction::new("product", move |x| {
        let mut acc = one.scale(&c);
        for a in &maps {
            acc = acc.mul(&a.eval(x)?)?;
        }
        Ok(acc)
    })
}

fn criterion_4() -> Outcome {
    let k = tower("Q(t)");
    let pool = additive_pool(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples = SampleSet::default_for(&k);
    let mut compared = 0;
    for trial in 0..20 {
        let mut pieces = vec![PointFunction::constant(k.rational(&small_rational(&mut rng)))];
        for deg in 1..=3 {
            let mut piece = PointFunction::constant(k.zero());
            for _ in 0..rng.gen_range(1..=2) {
                let maps = (0..deg).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
                piece = piece.plus(&product_trace(&k, small_rational(&mut rng), maps));
            }
            pieces.push(piece);
        }
        let p = pieces.iter().skip(1).fold(pieces[0].clone(), |acc, f| acc.plus(f));
        let dec = ok(decompose_polynomial(&p, 3, &samples), "decompose")?;
        let fresh = SampleSet::random(&k, 10, 4000 + trial);
        for x in fresh.iter() {
            for (deg, piece) in pieces.iter().enumerate() {
                let got = ok(dec.trace(deg).expect("trace").eval(x), "trace")?;
                let want = ok(piece.eval(x), "piece")?;
                ensure!(got == want, "trial {trial}: f{deg}({x}) = {got}, want {want}");
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} trace values recovered"))
}

fn criterion_5() -> Outcome {
    let k = tower("Q(t)");
    let d = d_t(&k);
    let samples = SampleSet::default_for(&k);
    let mut count = 0;
    for (n, m) in [(2usize, 1usize), (3, 1), (3, 2)] {
        let q = ratio(n as i64, m as i64);
        let pairs = [
            (AdditiveMap::identity(), AdditiveMap::identity()),
            (d.clone(), d.scaled(&q)),
            (id_plus(&d, 2), id_plus(&d.scaled(&q), 3)),
        ];
        for (f, g) in &pairs {
            let phi = ok(symmetrize_power_pair(f, g, n, m), "symmetrize")?;
            let sym = ok(phi.check_symmetry(&samples, 32, 55), "symmetry")?;
            ensure!(sym.passed(), "n={n}, m={m}, f={f}: not symmetric");
            let slots = ok(phi.check_slot_additivity(&samples, 32, 56), "slots")?;
            ensure!(slots.passed(), "n={n}, m={m}, f={f}: slot additivity {:?}", slots.witness);
            ensure!(slots.samples_tested == 32 * n, "ran {} slot trials", slots.samples_tested);
            let target = phi_power_function(f, g, n as i64, m as i64);
            let tr = ok(check_trace(&phi, &target, &samples), "trace")?;
            ensure!(tr.passed(), "n={n}, m={m}, f={f}: trace {:?}", tr.witness);
            let v = ok(verify_phi_power(f, g, n as i64, m as i64, &samples), "phi")?;
            ensure!(v.passed(), "n={n}, m={m}, f={f}: phi {:?}", v.witness);
            let c = f.eval(&k.one()).unwrap().sub(&g.eval(&k.one()).unwrap()).unwrap();
            ensure!(v.values.get("c") == Some(&c.to_string()), "c = {:?}, want {c}", v.values.get("c"));
            count += 1;
        }
    }
    Ok(format!("{count} symmetrizations"))
}

/// The shared corpus of additive maps on Q(√2) and Q(t) for the χ and composite checks.
fn corpus() -> Vec<(TowerField, Vec<(AdditiveMap, AdditiveMap)>)> {
    let q = tower("Q(sqrt2 | x^2 - 2)");
    let r = q.generator("sqrt2").unwrap();
    let proj = matrix_map(vec![q.one(), r.clone()], vec![q.zero(), q.one()]).unwrap();
    let skew = matrix_map(vec![q.one(), r.clone()], vec![r.scale(&rat(3)), q.integer(7)]).unwrap();
    let sigma = quadratic_conjugation(&q, "sqrt2").unwrap();
    let id = AdditiveMap::identity();
    let k = tower("Q(t)");
    let t = k.generator("t").unwrap();
    let d = d_t(&k);
    let d2 = derivation_extend(&k, &[("t", t.mul(&t).unwrap())]).unwrap();
    let mult = AdditiveMap::Multiplication(t.add_rational(&rat(2)));
    vec![
        (
            q.clone(),
            vec![
                (proj.clone(), skew.clone()),
                (skew.clone(), proj.clone()),
                (sigma.clone(), id.clone()),
                (proj.plus(&sigma), id.scaled(&rat(2))),
                (skew.scaled(&ratio(1, 3)), sigma),
            ],
        ),
        (
            k,
            vec![
                (d.clone(), d.scaled(&rat(2))),
                (id_plus(&d, 2), id_plus(&d2, -1)),
                (mult.clone(), d2.clone()),
                (d2.plus(&mult), mult),
                (id.clone(), id_plus(&d, 5)),
            ],
        ),
    ]
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    for (k, pairs) in corpus() {
        let samples = SampleSet::default_for(&k);
        for (f, g) in &pairs {
            let r = ok(chi_transform_identity(f, g, &samples), "chi")?;
            ensure!(r.passed(), "f={f}, g={g}: {:?}", r.witness);
            ensure!(r.samples_tested >= 18, "only {} samples", r.samples_tested);
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for (k, pairs) in corpus() {
        let samples = SampleSet::default_for(&k);
        let t = k.generator("t").ok();
        let maps: Vec<&AdditiveMap> = pairs.iter().flat_map(|(f, g)| [f, g]).collect();
        for f in maps {
            // derivation part F = f − f(1)·id, probed at the generator
            let f1 = f.eval(&k.one()).unwrap();
            let has_derivation_part = match &t {
                Some(t) => !f.eval(t).unwrap().sub(&f1.mul(t).unwrap()).unwrap().is_zero(),
                None => false,
            };
            for (n, m) in [(2i64, 1i64), (3, -2)] {
                let q = ratio(n, m);
                for kappa in [q.clone(), q.clone() + rat(1), rat(1)] {
                    let r = ok(composite_power_identity(f, &kappa, n, m, &samples), "composite")?;
                    let ident = r.sub("composite_identity").expect("identity sub-verdict");
                    ensure!(ident.passed(), "f={f}, kappa={kappa}: identity {:?}", ident.witness);
                    let concl = r.sub("conclusion").expect("conclusion sub-verdict");
                    if has_derivation_part {
                        let want = if kappa == q { Status::Pass } else { Status::Fail };
                        ensure!(concl.status == want, "f={f}, n={n}, m={m}, kappa={kappa}: {:?}", concl.status);
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} composite checks"))
}

/// a + b·ε with ε² = 0 over field arithmetic; evaluating on (x, D(x)) yields (e, D(e)).
#[derive(Clone)]
struct Dual {
    a: FieldElement,
    b: FieldElement,
}

impl Dual {
    fn constant(k: &TowerField, q: &Rational) -> Dual {
        Dual { a: k.rational(q), b: k.zero() }
    }
    fn add(&self, o: &Dual) -> Dual {
        Dual { a: self.a.add(&o.a).unwrap(), b: self.b.add(&o.b).unwrap() }
    }
    fn mul(&self, o: &Dual) -> Dual {
        let b = self.a.mul(&o.b).unwrap().add(&self.b.mul(&o.a).unwrap()).unwrap();
        Dual { a: self.a.mul(&o.a).unwrap(), b }
    }
    fn scale(&self, q: &Rational) -> Dual {
        Dual { a: self.a.scale(q), b: self.b.scale(q) }
    }
    fn recip(&self) -> Dual {
        let a = self.a.inv().unwrap();
        let b = self.b.mul(&a).unwrap().mul(&a).unwrap().neg();
        Dual { a, b }
    }
    fn powi(&self, n: i64) -> Dual {
        let k = self.a.tower();
        let mut acc = Dual::constant(k, &rat(1));
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(self);
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn mobius(&self, m: &MobiusCoeffs, n: i64) -> Dual {
        let k = self.a.tower();
        let y = self.powi(n);
        let num = y.scale(m.a()).add(&Dual::constant(k, m.b()));
        let den = y.scale(m.c()).add(&Dual::constant(k, m.d()));
        num.mul(&den.recip())
    }
}

fn criterion_8() -> Outcome {
    let k = tower("Q(t)");
    let t = k.generator("t").unwrap();
    let d = d_t(&k);
    let samples = SampleSet::default_for(&k);
    // chain-rule oracle: D(M(xⁿ)) = n·det·x^(n−1)·D(x)/(c·xⁿ + d)²
    let tt = Dual { a: t.clone(), b: k.one() };
    let c = |q: i64| Dual::constant(&k, &rat(q));
    let duals = [
        tt.clone(),
        tt.add(&c(3)),
        tt.mul(&tt).add(&c(-2)),
        tt.scale(&ratio(2, 7)).add(&c(1)),
        tt.add(&c(4)).recip(),
        tt.mul(&tt).mul(&tt).add(&tt).add(&c(7)),
    ];
    let mut oracle = 0;
    for m in &matrices() {
        for n in EXPONENTS {
            for x in &duals {
                if m.is_pole(n, &x.a) || x.a.is_zero() {
                    continue;
                }
                let y = x.mobius(m, n);
                let den = m.denominator(n, &x.a).unwrap();
                let predicted = x.a.pow(n - 1).unwrap().mul(&x.b).unwrap().scale(&(m.det() * rat(n)));
                let predicted = predicted.div(&den.mul(&den).unwrap()).unwrap();
                ensure!(y.b == predicted, "oracle: M={m}, n={n}, x={}: {} vs {predicted}", x.a, y.b);
                ensure!(d.eval(&y.a).unwrap() == y.b, "structural D disagrees with oracle at M={m}, n={n}");
                oracle += 1;
            }
        }
    }
    let mut checks = 0;
    let d2 = derivation_extend(&k, &[("t", t.mul(&t).unwrap().add_rational(&rat(1)))]).unwrap();
    for f in [&d, &d2] {
        for m in &matrices() {
            for n in EXPONENTS {
                if excluded(m, n) {
                    continue;
                }
                let factor = m.det() * rat(n);
                let star = ok(check_star(f, &f.scaled(&factor), n, m, &samples), "star")?;
                ensure!(star.passed(), "star M={m}, n={n}: {:?}", star.witness);
                let (alpha, beta) = (ratio(3, 2), rat(-2));
                let fwd = ok(verify_mobius_forward(f, &alpha, &beta, n, m, &samples, None), "forward")?;
                ensure!(fwd.passed(), "forward M={m}, n={n}: {:?}", fwd.sub_verdicts);
                let bad = &factor * rat(2);
                let star = ok(check_star(f, &f.scaled(&bad), n, m, &samples), "star")?;
                ensure!(star.failed(), "perturbed star passed for M={m}, n={n}");
                let w = star.witness.as_ref().ok_or("perturbed star has no witness")?;
                ensure!(w.lhs != w.rhs, "witness sides agree");
                let fwd = ok(verify_mobius_forward(f, &alpha, &beta, n, m, &samples, Some(&bad)), "forward")?;
                ensure!(fwd.failed(), "perturbed forward passed for M={m}, n={n}");
                let main = fwd.sub("mobius_forward").expect("main sub-verdict");
                ensure!(main.witness.is_some(), "perturbed forward has no witness");
                checks += 1;
            }
        }
    }
    for m in &matrices() {
        for n in EXPONENTS {
            if excluded(m, n) {
                let r = verify_mobius_forward(&d, &rat(1), &rat(1), n, m, &samples, None);
                ensure!(matches!(r, Err(Error::ParameterOutOfRange(_))), "M={m}, n={n} was not rejected");
            }
        }
    }
    Ok(format!("{oracle} oracle points, {checks} (M, n, F) cases"))
}

fn criterion_9() -> Outcome {
    let q = tower("Q(sqrt2 | x^2 - 2)");
    let samples = SampleSet::default_for(&q);
    let sigma = quadratic_conjugation(&q, "sqrt2").unwrap();
    let id = AdditiveMap::identity();
    let mut count = 0;
    for f in [&sigma, &id] {
        for m in &matrices() {
            for n in EXPONENTS {
                let r = ok(check_triangle(f, f, n, m, &samples), "triangle")?;
                ensure!(r.passed(), "f={f}, M={m}, n={n}: {:?}", r.witness);
                count += 1;
            }
        }
    }
    let two = AdditiveMap::scaled_identity(rat(2));
    let m = MobiusCoeffs::from_i64(1, 1, 0, 1).unwrap();
    let r = ok(check_triangle(&two, &two, 1, &m, &samples), "triangle")?;
    ensure!(r.failed() && r.witness.is_some(), "2 id with M=(1,1;0,1) did not fail");
    Ok(format!("{count} passing cases, 2 id rejected"))
}

fn criterion_10() -> Outcome {
    let q = tower("Q(sqrt2 | x^2 - 2)");
    let samples = SampleSet::default_for(&q);
    let two = AdditiveMap::scaled_identity(rat(2));
    let r = ok(check_linearity_theorem(&two, 2, &samples), "linearity")?;
    ensure!(r.passed(), "2 id failed");
    ensure!(r.values["branch"] == "linear" && r.values["c"] == "-2", "2 id: {:?}", r.values);

    let sigma = quadratic_conjugation(&q, "sqrt2").unwrap();
    let r = ok(check_linearity_theorem(&sigma, 2, &samples), "linearity")?;
    ensure!(r.passed(), "sigma failed");
    ensure!(r.values["branch"] == "homomorphism" && r.values["c"] == "0", "sigma: {:?}", r.values);
    ensure!(r.notes.iter().any(|n| n == NONLINEAR_HOMOMORPHISM_NOTE), "sigma not flagged nonlinear");

    let root = q.generator("sqrt2").unwrap();
    let proj = matrix_map(vec![q.one(), root], vec![q.zero(), q.one()]).unwrap();
    let r = ok(check_linearity_theorem(&proj, 2, &samples), "linearity")?;
    let target = r.sub("target_form").expect("target sub-verdict");
    ensure!(target.failed() && target.witness.is_some(), "projection: phi accepted as c x^2");
    ensure!(r.failed(), "projection: overall verdict {:?}", r.status);
    Ok("linear, homomorphism and failing branches".into())
}

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_derivlab"))
}

/// Random element text over the tower's generators.
fn random_expr(rng: &mut ChaCha8Rng, names: &[&str], depth: u32) -> String {
    let atom = |rng: &mut ChaCha8Rng| -> String {
        if rng.gen_bool(0.5) {
            names[rng.gen_range(0..names.len())].to_string()
        } else {
            rng.gen_range(0..12).to_string()
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return atom(rng);
    }
    let a = random_expr(rng, names, depth - 1);
    let b = random_expr(rng, names, depth - 1);
    match rng.gen_range(0..7) {
        0 => format!("{a} + {b}"),
        1 => format!("{a} - {b}"),
        2 => format!("({a})*({b})"),
        3 => format!("({a})/({b})"),
        4 => format!("({a})^{}", rng.gen_range(-2..=3)),
        5 => format!("-({a})"),
        _ => format!("{}/{} * ({a})", rng.gen_range(1..9), rng.gen_range(1..9)),
    }
}

fn criterion_11() -> Outcome {
    let opts = RunOptions::default();
    for b in SCENARIOS {
        let s = ok(parse_scenario(b.source), b.name)?;
        let named = RunOptions { scenario: Some(b.name.to_string()), ..opts.clone() };
        let first = run_scenario(&s, &named).to_json();
        let second = run_scenario(&parse_scenario(b.source).unwrap(), &named).to_json();
        ensure!(first == second, "{}: library JSON differs between runs", b.name);
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = ok(
                Command::new(binary()).args(["demo", b.name, "--format", "json", "--no-timestamp"]).output(),
                "spawn",
            )?;
            ensure!(out.status.code() == Some(0), "{}: exit {:?}", b.name, out.status.code());
            outputs.push(out.stdout);
        }
        ensure!(outputs[0] == outputs[1], "{}: binary JSON differs between runs", b.name);
        ensure!(outputs[0] == first.as_bytes(), "{}: binary and library JSON differ", b.name);
    }

    let towers = ["Q(t)", "Q(sqrt2 | x^2 - 2)", "Q(t, s | s^2 = t)", "Q(a | x^3 - 2)", "Q(r, u | x^2 - 2, x^3 - 3)"];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut roundtrips = 0;
    let mut attempts = 0;
    while roundtrips < 500 {
        attempts += 1;
        ensure!(attempts < 5000, "too many rejected expressions");
        let k = tower(towers[roundtrips % towers.len()]);
        let names = k.generator_names();
        let text = random_expr(&mut rng, &names, 3);
        let Ok(e) = parse_element(&text, &k) else {
            continue;
        };
        let printed = e.to_string();
        let back = ok(parse_element(&printed, &k), &printed)?;
        ensure!(back == e, "`{text}` printed as `{printed}` reparses as `{back}`");
        ensure!(back.to_string() == printed, "printing `{printed}` is not stable");
        roundtrips += 1;
    }

    let dir = std::env::temp_dir().join(format!("derivlab-acceptance-{}", std::process::id()));
    ok(std::fs::create_dir_all(&dir), "temp dir")?;
    let violated = dir.join("violated.dlab");
    let broken = dir.join("broken.dlab");
    std::fs::write(&violated, "tower Q(t)\nmap D = d/dt with D(t)=1\nmap P = D + 2*id\ncheck power_rule f=P k=2\n").unwrap();
    std::fs::write(&broken, "tower Q(t)\nmap D = d/dt with D(t)=1\ncheck power_rule f=D k=(\n").unwrap();
    let run = |path: &PathBuf| Command::new(binary()).arg("run").arg(path).output();
    let v = ok(run(&violated), "spawn")?;
    ensure!(v.status.code() == Some(1), "violated expectation exited {:?}", v.status.code());
    let e = ok(run(&broken), "spawn")?;
    ensure!(e.status.code() == Some(2), "syntax error exited {:?}", e.status.code());
    let stderr = String::from_utf8_lossy(&e.stderr);
    let lines: Vec<&str> = stderr.lines().collect();
    ensure!(lines.len() == 1 && lines[0].contains("3:") && lines[0].contains("SyntaxError"), "diagnostic: {stderr:?}");
    let u = ok(Command::new(binary()).args(["demo", "no_such_scenario"]).output(), "spawn")?;
    ensure!(u.status.code() == Some(2), "unknown demo exited {:?}", u.status.code());
    std::fs::remove_dir_all(&dir).ok();
    Ok(format!("{} scenarios deterministic, {roundtrips} roundtrips, exit codes 0/1/2", SCENARIOS.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("power rule via Leibniz extension", 5, criterion_1),
        ("derivations vanish on algebraic numbers", 2, criterion_2),
        ("difference calculus identities", 5, criterion_3),
        ("polynomial decomposition roundtrip", 10, criterion_4),
        ("power-pair symmetrization", 20, criterion_5),
        ("chi-transform identity", 10, criterion_6),
        ("composite power identity", 10, criterion_7),
        ("Mobius forward direction", 30, criterion_8),
        ("automorphism check", 5, criterion_9),
        ("linearity branches", 5, criterion_10),
        ("CLI determinism and roundtrip", 10, criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(d) if elapsed <= Duration::from_secs(*limit) => (true, d),
            Ok(d) => (false, format!("{d}; exceeded {limit}s")),
            Err(e) => (false, e),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2}: {} {name} ({:.2}s, limit {limit}s) {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
