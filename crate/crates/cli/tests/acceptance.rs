//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Run with
//! `cargo test -p wedgehs-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wedgehs::cayley::{
    char_coeffs, integration_by_parts_check, integration_by_parts_with_inverse, u_wedge_identity,
    Endomorphism, Pipeline,
};
use wedgehs::expode::{
    egf_identity, expm_leonard, expm_putzer, expm_taylor, h_series, ode_residual,
    ode_residual_by_derivatives, u_basis, v_basis,
};
use wedgehs::{Blade, Matrix, Multivector, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type IntMatrix = Vec<Vec<i128>>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn random_int_matrix(rng: &mut ChaCha8Rng, r: usize) -> IntMatrix {
    (0..r)
        .map(|_| (0..r).map(|_| rng.gen_range(-9..=9)).collect())
        .collect()
}

fn to_endo(m: &IntMatrix) -> Endomorphism {
    let rows = m
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from(x as i64)).collect())
        .collect();
    Endomorphism::new(Matrix::from_rows(rows).unwrap()).unwrap()
}

/// The shared corpus of criteria 2 to 8: 50 matrices with `r ≤ 4`.
fn corpus() -> Vec<IntMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    (0..50)
        .map(|_| {
            let r = rng.gen_range(1..=4);
            random_int_matrix(&mut rng, r)
        })
        .collect()
}

fn int_matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn int_identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

/// `[1, f, f^2, ..., f^n]` by repeated multiplication.
fn int_powers(f: &IntMatrix, n: usize) -> Vec<IntMatrix> {
    let mut out = vec![int_identity(f.len())];
    for _ in 0..n {
        let next = int_matmul(out.last().unwrap(), f);
        out.push(next);
    }
    out
}

fn same_matrix(m: &Matrix, oracle: &IntMatrix) -> bool {
    oracle.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, x)| m.get(i, j).to_string() == x.to_string())
    })
}

fn as_int(q: &Rational) -> i128 {
    q.to_string().parse().expect("integer value")
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i128)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, sign) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // Moving the new largest element left past `len - pos` entries.
            let s = if (p.len() - pos) % 2 == 0 {
                sign
            } else {
                -sign
            };
            out.push((q, s));
        }
    }
    out
}

/// Coefficients of `det(t·1 - f)` in ascending powers of `t`, by the
/// Leibniz expansion over all permutations.
fn leibniz_charpoly(f: &IntMatrix) -> Vec<i128> {
    let r = f.len();
    let mut total = vec![0i128; r + 1];
    for (perm, sign) in permutations(r) {
        let mut term = vec![sign];
        for (i, &j) in perm.iter().enumerate() {
            let entry = if i == j {
                vec![-f[i][j], 1]
            } else {
                vec![-f[i][j]]
            };
            term = poly_mul(&term, &entry);
        }
        for (k, c) in term.into_iter().enumerate() {
            total[k] += c;
        }
    }
    total
}

fn random_multivector(rng: &mut ChaCha8Rng, ctx: wedgehs::Context) -> Multivector {
    let total = 1u32 << ctx.rank();
    let mut terms = Vec::new();
    for m in 0..total {
        if rng.gen_bool(0.5) {
            let num = rng.gen_range(-9..=9i64);
            let den = rng.gen_range(1..=3i64);
            terms.push((Blade::from_mask(m), Rational::new(num, den)));
        }
    }
    Multivector::from_terms(ctx, terms).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for case in 0..200 {
        let r = rng.gen_range(1..=5);
        let m = random_int_matrix(&mut rng, r);
        let e = char_coeffs(&to_endo(&m)).map_err(|e| e.to_string())?;
        let det = leibniz_charpoly(&m);
        for k in 0..=r {
            let got = e.signed(k).to_string();
            ensure(got == det[r - k].to_string(), || {
                format!(
                    "case {case} {m:?}: coefficient of t^{} is {}, got {got}",
                    r - k,
                    det[r - k]
                )
            })?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("200 matrices in {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    for (case, m) in corpus().iter().enumerate() {
        let p = Pipeline::new(&to_endo(m), 16).map_err(|e| e.to_string())?;
        let powers = int_powers(m, 16);
        for (j, oracle) in powers.iter().enumerate() {
            ensure(same_matrix(p.f_t.coeffs()[j].block(1), oracle), || {
                format!("case {case}: f_{j} on M differs from f^{j}")
            })?;
        }
    }
    Ok("50 matrices, j ≤ 16".into())
}

fn criterion_3() -> Outcome {
    let mut blocks = 0;
    for (case, m) in corpus().iter().enumerate() {
        let r = m.len();
        let p = Pipeline::new(&to_endo(m), 2 * r + 4).map_err(|e| e.to_string())?;
        for j in 0..=p.order {
            let fj = p.fbar.alternating_coeff(j);
            for i in 0..=r {
                if j > i {
                    ensure(fj.block(i).is_zero(), || {
                        format!("case {case}: f̄_{j} nonzero on grade {i}")
                    })?;
                    blocks += 1;
                }
            }
            if j > r {
                ensure(fj.is_zero(), || format!("case {case}: f̄_{j} nonzero"))?;
            }
        }
    }
    Ok(format!("{blocks} zero blocks"))
}

fn criterion_4() -> Outcome {
    let mut blocks = 0;
    for (case, m) in corpus().iter().enumerate() {
        let r = m.len();
        let p = Pipeline::new(&to_endo(m), 2 * r + 4).map_err(|e| e.to_string())?;
        for h in 1..=r {
            for k in (r - h + 1)..=(2 * r + 4) {
                ensure(p.u.get(k).block(h).is_zero(), || {
                    format!("case {case}: U_{k} nonzero on grade {h}")
                })?;
                blocks += 1;
            }
        }
    }
    Ok(format!("{blocks} zero blocks"))
}

fn criterion_5() -> Outcome {
    for (case, m) in corpus().iter().enumerate() {
        let r = m.len();
        let e = char_coeffs(&to_endo(m)).map_err(|e| e.to_string())?;
        let powers = int_powers(m, r + 8);
        for i in 0..=8 {
            let mut acc = vec![vec![0i128; r]; r];
            for k in 0..=r {
                let c = as_int(&e.signed(k));
                for (a, row) in acc.iter_mut().zip(&powers[r + i - k]) {
                    for (x, y) in a.iter_mut().zip(row) {
                        *x += c * y;
                    }
                }
            }
            ensure(acc.iter().flatten().all(|&x| x == 0), || {
                format!("case {case}: residual with shift f^{i}: {acc:?}")
            })?;
        }
    }
    Ok("50 matrices, shifts i ≤ 8".into())
}

fn hs_and_parts(
    case: usize,
    m: &IntMatrix,
    rng: &mut ChaCha8Rng,
    lemma: bool,
) -> Result<usize, String> {
    let f = to_endo(m);
    let ctx = f.context();
    let p = Pipeline::new(&f, 2 * m.len() + 4).map_err(|e| e.to_string())?;
    let pairs: Vec<_> = (0..20)
        .map(|_| (random_multivector(rng, ctx), random_multivector(rng, ctx)))
        .collect();
    if lemma {
        for (s, (a, b)) in pairs.iter().enumerate() {
            let report = u_wedge_identity(&p, a, b).map_err(|e| e.to_string())?;
            ensure(report.holds, || {
                format!("case {case}, pair {s}: {:?}", report.failures)
            })?;
        }
        return Ok(pairs.len());
    }
    let report = p.fbar.is_hs(&pairs).map_err(|e| e.to_string())?;
    ensure(report.holds, || {
        format!("case {case}: {:?}", report.failures)
    })?;
    for (s, (a, b)) in pairs.iter().enumerate() {
        // Direct expansion: D_j(a ∧ b) = Σ_i D_i a ∧ D_{j-i} b.
        let da = p.fbar.apply(a).unwrap();
        let db = p.fbar.apply(b).unwrap();
        let lhs = p.fbar.apply(&a.wedge(b).unwrap()).unwrap();
        for (j, l) in lhs.iter().enumerate() {
            let mut rhs = Multivector::zero(ctx);
            for i in 0..=j {
                rhs = &rhs + &da[i].wedge(&db[j - i]).unwrap();
            }
            ensure(*l == rhs, || {
                format!("case {case}, pair {s}: product rule at t^{j}")
            })?;
        }
        let ibp = if s == 0 {
            integration_by_parts_check(&p.fbar, a, b)
        } else {
            integration_by_parts_with_inverse(&p.fbar, &p.f_t, a, b)
        }
        .map_err(|e| e.to_string())?;
        ensure(ibp.holds, || {
            format!(
                "case {case}, pair {s}: integration by parts {:?}",
                ibp.failures
            )
        })?;
    }
    Ok(pairs.len())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut n = 0;
    for (case, m) in corpus().iter().enumerate() {
        n += hs_and_parts(case, m, &mut rng, false)?;
    }
    Ok(format!("{n} pairs"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut n = 0;
    for (case, m) in corpus().iter().enumerate() {
        n += hs_and_parts(case, m, &mut rng, true)?;
    }
    Ok(format!("{n} pairs"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    for (case, m) in corpus().iter().enumerate() {
        let f = to_endo(m);
        let putzer = expm_putzer(&f, 16).map_err(|e| e.to_string())?;
        let leonard = expm_leonard(&f, 16).map_err(|e| e.to_string())?;
        let taylor = expm_taylor(&f, 16);
        let powers = int_powers(m, 16);
        for (n, power) in powers.iter().enumerate() {
            let (p, l, t) = (
                &putzer.coeffs()[n],
                &leonard.coeffs()[n],
                &taylor.coeffs()[n],
            );
            ensure(p == l, || format!("case {case}: putzer/leonard at t^{n}"))?;
            ensure(l == t, || format!("case {case}: leonard/taylor at t^{n}"))?;
            ensure(same_matrix(t, power), || format!("case {case}: f^{n}"))?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("50 matrices through t^16 in {elapsed:.2?}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut solutions = 0;
    for case in 0..20 {
        let r = 1 + case % 5;
        let m = random_int_matrix(&mut rng, r);
        let f = to_endo(&m);
        let e = char_coeffs(&f).map_err(|e| e.to_string())?;
        let u = u_basis(&e, 20).map_err(|e| e.to_string())?;
        let v = v_basis(&e, 20).map_err(|e| e.to_string())?;
        for (j, y) in u.iter().chain(&v).enumerate() {
            for res in [ode_residual(y, &e), ode_residual_by_derivatives(y, &e)] {
                let res = res.map_err(|e| e.to_string())?;
                ensure(res.coeffs().iter().all(Rational::is_zero), || {
                    format!(
                        "case {case}: basis solution {j} has residual {:?}",
                        res.coeffs()
                    )
                })?;
            }
            solutions += 1;
        }
        let p = Pipeline::new(&f, 20).map_err(|e| e.to_string())?;
        let report = egf_identity(&p).map_err(|e| e.to_string())?;
        ensure(report.identity_failures.is_empty(), || {
            format!(
                "case {case}: EGF expansion fails at {:?}",
                report.identity_failures
            )
        })?;
        ensure(report.ode_failures.is_empty(), || {
            format!(
                "case {case}: blockwise residual nonzero at {:?}",
                report.ode_failures
            )
        })?;
    }
    Ok(format!("{solutions} basis solutions, 20 EGF expansions"))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn criterion_10() -> Outcome {
    let rotation = to_endo(&vec![vec![0, 1], vec![-1, 0]]);
    let e = char_coeffs(&rotation).map_err(|e| e.to_string())?;
    ensure(e.values() == [Rational::zero(), Rational::one()], || {
        format!("rotation e = {:?}", e.values())
    })?;
    let v = v_basis(&e, 16).map_err(|e| e.to_string())?;
    let (cos, sin) = (v[0].to_ordinary(), v[1].to_ordinary());
    for n in 0..=16 {
        let sign = if (n / 2) % 2 == 0 { 1 } else { -1 };
        let term = Rational::new(sign, factorial(n));
        let (want_cos, want_sin) = if n % 2 == 0 {
            (term, Rational::zero())
        } else {
            (Rational::zero(), term)
        };
        ensure(cos.coeff(n) == want_cos, || {
            format!("v_0 at t^{n}: {}", cos.coeff(n))
        })?;
        ensure(sin.coeff(n) == want_sin, || {
            format!("v_1 at t^{n}: {}", sin.coeff(n))
        })?;
    }

    let diag = to_endo(&vec![vec![1, 0], vec![0, 2]]);
    let e = char_coeffs(&diag).map_err(|e| e.to_string())?;
    ensure(e.values() == [Rational::from(3), Rational::from(2)], || {
        format!("diag e = {:?}", e.values())
    })?;
    // h_n = e_1 h_{n-1} - e_2 h_{n-2}.
    let mut h = vec![1i64, 3];
    while h.len() <= 12 {
        let n = h.len();
        h.push(3 * h[n - 1] - 2 * h[n - 2]);
    }
    let got = h_series(&e, 12);
    for (n, want) in h.iter().enumerate() {
        ensure(got.coeff(n) == Rational::from(*want), || {
            format!("h_{n} = {}", got.coeff(n))
        })?;
    }
    ensure(h[..4] == [1, 3, 7, 15], || format!("oracle h = {h:?}"))?;

    let p = Pipeline::new(&diag, 8).map_err(|e| e.to_string())?;
    let residual = p.literal_residual(1, 1);
    ensure(residual == Matrix::from_i64(&[&[-2]]), || {
        format!("R(1,1) = {:?}", residual.row_vecs())
    })?;
    ensure(*residual.get(0, 0) == -e.get(2), || {
        "R(1,1) differs from -e_2".into()
    })?;
    Ok("rotation cos/sin, diag(1,2) e and h, R(1,1) = -2 (informational)".into())
}

fn cli_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run_cli(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wedgehs"))
        .args(args)
        .env_remove("WEDGEHS_MAX_RANK")
        .output()
        .expect("binary runs");
    (
        out.status.code(),
        String::from_utf8(out.stdout).expect("utf-8"),
    )
}

fn criterion_11() -> Outcome {
    let root = cli_root();
    let mut goldens = 0;
    for name in ["m1234", "diag12", "rotation"] {
        let input = root.join("data").join(format!("{name}.json"));
        for cmd in ["charpoly", "verify", "expm"] {
            let (code, stdout) = run_cli(&[cmd, input.to_str().unwrap()]);
            ensure(code == Some(0), || format!("{cmd} {name}: exit {code:?}"))?;
            let golden_path = root.join("golden").join(format!("{cmd}_{name}.json"));
            let golden = std::fs::read_to_string(&golden_path)
                .map_err(|e| format!("{}: {e}", golden_path.display()))?;
            ensure(stdout == golden, || {
                format!("{cmd} {name}: output differs from golden")
            })?;
            goldens += 1;
        }
    }
    let data = root.join("data");
    let bad_input = [
        "malformed.json",
        "non_square.json",
        "bad_literal.json",
        "rank_too_large.json",
    ];
    for file in bad_input {
        let (code, _) = run_cli(&["verify", data.join(file).to_str().unwrap()]);
        ensure(code == Some(2), || format!("{file}: exit {code:?}, want 2"))?;
    }
    let m = data.join("m1234.json");
    let m = m.to_str().unwrap();
    for args in [
        vec!["verify", "--order", "3", m],
        vec!["expm", "--at", "1.5", m],
        vec!["hs", "--grade", "3", m],
        vec!["no-such-command"],
    ] {
        let (code, _) = run_cli(&args);
        ensure(code == Some(2), || {
            format!("{args:?}: exit {code:?}, want 2")
        })?;
    }
    Ok(format!("{goldens} goldens, exit codes 0 and 2"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "characteristic coefficients vs Leibniz determinant",
            criterion_1,
        ),
        ("f_j on M equals f^j", criterion_2),
        ("f̄_j vanishes above its grade", criterion_3),
        ("graded U-vanishing", criterion_4),
        ("classic Cayley-Hamilton with shifts", criterion_5),
        ("HS product rule and integration by parts", criterion_6),
        ("U-wedge identity", criterion_7),
        ("three-way exponential agreement", criterion_8),
        ("ODE bases and EGF expansion", criterion_9),
        ("pinned values", criterion_10),
        ("CLI goldens and exit codes", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{:.2?}]",
                i + 1,
                start.elapsed()
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
