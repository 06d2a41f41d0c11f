//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines are always shown.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fockforge_core::bridge::{antisymmetric_spectrum, compare_evolutions, first_to_fock, plucker_overlap, CompareSetup};
use fockforge_core::firstq::{evolve_a1, slater_state, A1Plan};
use fockforge_core::fixedpoint::PhaseBits;
use fockforge_core::fock::{
    build_hamiltonian_matrix, evolve_a2, ladder_matrix, online_diagonal_phase, A2Mode, A2Plan, FockState, LadderKind,
    SecondQuantHamiltonian, SectorBasis,
};
use fockforge_core::lattice::{KineticMatrix, LatticeSpec, MomentumTransform, PairInteraction, PotentialField};
use fockforge_core::measure::{
    alias_period, cosine_law, generator_identity_check, kitaev_circuit, phase_kickback_circuit, ramsey_protocol,
    von_neumann_measure, von_neumann_measure_for, Observable, Pulse,
};
use fockforge_core::{oracle, random, CMatrix, Complex64, DMatrix, Splitting};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ring_hamiltonian(m: usize, ramp: f64) -> SecondQuantHamiltonian {
    let spec = LatticeSpec::ring(m).unwrap();
    SecondQuantHamiltonian::new(
        KineticMatrix::ring(&spec, 1.0).unwrap(),
        PotentialField::new((0..m).map(|p| ramp * p as f64).collect()).unwrap(),
        PairInteraction::coulomb(&spec, 1.0).unwrap(),
    )
    .unwrap()
}

fn canonical_algebra() -> Outcome {
    let mut checked = 0;
    for m in 1..=5 {
        let dim = 1usize << m;
        let identity = DMatrix::<i32>::identity(dim, dim);
        let zero = DMatrix::<i32>::zeros(dim, dim);
        let a: Vec<_> = (0..m).map(|p| ladder_matrix(m, p, LadderKind::Annihilate).unwrap()).collect();
        let ad: Vec<_> = (0..m).map(|p| ladder_matrix(m, p, LadderKind::Create).unwrap()).collect();
        for i in 0..m {
            for j in 0..m {
                check(&a[i] * &a[j] + &a[j] * &a[i] == zero, || format!("{{a{i},a{j}}} != 0 at M={m}"))?;
                let expected = if i == j { identity.clone() } else { zero.clone() };
                check(&a[i] * &ad[j] + &ad[j] * &a[i] == expected, || {
                    format!("{{a{i},a†{j}}} wrong at M={m}")
                })?;
                checked += 2;
            }
        }
    }
    Ok(format!("{checked} anticommutators exact"))
}

fn distinct_indices<R: Rng>(rng: &mut R, m: usize, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    (0..n).map(|_| pool.swap_remove(rng.random_range(0..pool.len()))).collect()
}

fn plucker_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..200u64 {
        let mut rng = random::rng(seed, random::streams::OBSERVABLE);
        let m = rng.random_range(1..=6usize);
        let n = rng.random_range(1..=3usize.min(m));
        let c = random::unitary(m, &mut rng);
        let rows = distinct_indices(&mut rng, m, n);
        let cols = distinct_indices(&mut rng, m, n);
        let fast = plucker_overlap(&c, &rows, &cols).map_err(|e| e.to_string())?;
        let slow = oracle::brute_force_antisym_overlap(&c, &rows, &cols).map_err(|e| e.to_string())?;
        worst = worst.max((fast - slow).norm());
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("200 instances, max deviation {worst:.2e}"))
}

fn representation_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for (m, n) in [(3, 2), (4, 2), (4, 3)] {
        let h = ring_hamiltonian(m, 0.0);
        let h_first =
            oracle::first_quant_hamiltonian_dense(m, n, h.kinetic().entries(), h.potential().values(), h.pair().values())
                .map_err(|e| e.to_string())?;
        let first = antisymmetric_spectrum(&h_first, m, n).map_err(|e| e.to_string())?;
        let sector = SectorBasis::new(m, n).unwrap();
        let second = oracle::exact_spectrum(&build_hamiltonian_matrix(&h, Some(&sector)).unwrap()).unwrap();
        check(first.len() == second.len(), || format!("({m},{n}) dimension mismatch"))?;
        worst = worst.max(max_abs_diff(&first, &second));
    }
    check(worst <= 1e-9, || format!("spectrum deviation {worst:e}"))?;
    let report = compare_evolutions(&CompareSetup {
        hamiltonian: ring_hamiltonian(4, 0.0),
        orbital_basis: CMatrix::identity(4, 4),
        orbitals: vec![0, 1],
        time: 1.0,
        steps: 64,
        splitting: Splitting::Strang2,
    })
    .map_err(|e| e.to_string())?;
    check(report.oracle >= 1.0 - 1e-9, || format!("oracle fidelity {}", report.oracle))?;
    Ok(format!(
        "spectrum deviation {worst:.2e}, |1 - oracle fidelity| {:.1e}",
        (1.0 - report.oracle).abs()
    ))
}

fn slope(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn difference_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn trotter_convergence() -> Outcome {
    let (m, n, t) = (4, 2, 1.0);
    let h = ring_hamiltonian(m, 0.37);
    let start = slater_state(&CMatrix::identity(m, m), &[0, 1]).unwrap();
    let h_first =
        oracle::first_quant_hamiltonian_dense(m, n, h.kinetic().entries(), h.potential().values(), h.pair().values())
            .unwrap();
    let exact_first = &oracle::dense_expm(&h_first, t).unwrap() * CMatrix::from_column_slice(m * m, 1, start.amplitudes());
    let sector = SectorBasis::new(m, n).unwrap();
    let start_fock = first_to_fock(&start).unwrap();
    let coeffs = start_fock.sector_amplitudes(&sector);
    let exact_sector = &oracle::dense_expm(&build_hamiltonian_matrix(&h, Some(&sector)).unwrap(), t).unwrap()
        * CMatrix::from_column_slice(coeffs.len(), 1, &coeffs);
    let transform = MomentumTransform::new(h.kinetic()).unwrap();

    let divisions = [8usize, 16, 32, 64, 128];
    let dts: Vec<f64> = divisions.iter().map(|&k| t / k as f64).collect();
    let mut summary = Vec::new();
    for (splitting, target) in [(Splitting::LieTrotter1, 1.0), (Splitting::Strang2, 2.0)] {
        let mut a1_errors = Vec::new();
        let mut a2_errors = Vec::new();
        for &k in &divisions {
            let dt = t / k as f64;
            let mut first = start.clone();
            evolve_a1(&mut first, &A1Plan::new(dt, k, splitting, None).unwrap(), h.potential(), h.pair(), &transform)
                .unwrap();
            a1_errors.push(difference_norm(first.amplitudes(), exact_first.as_slice()));
            let mut fock = start_fock.clone();
            evolve_a2(&mut fock, &A2Plan::new(dt, k, splitting, A2Mode::Precomputed).unwrap(), &h).unwrap();
            a2_errors.push(difference_norm(&fock.sector_amplitudes(&sector), exact_sector.as_slice()));
        }
        for (name, errors) in [("a1", &a1_errors), ("a2", &a2_errors)] {
            let s = slope(&dts, errors);
            check((s - target).abs() <= 0.15, || {
                format!("{name} {} slope {s:.3}, errors {errors:?}", splitting.name())
            })?;
            summary.push(format!("{name}/{} {s:.3}", splitting.name()));
        }
    }
    Ok(format!("slopes {}", summary.join(", ")))
}

fn online_fidelity() -> Outcome {
    let (m, steps, dt, strength) = (8, 20, 0.05, 1.0);
    let spec = LatticeSpec::ring(m).unwrap();
    let h = SecondQuantHamiltonian::new(
        KineticMatrix::ring(&spec, 1.0).unwrap(),
        PotentialField::new((0..m).map(|p| 0.1 * p as f64).collect()).unwrap(),
        PairInteraction::coulomb(&spec, strength).unwrap(),
    )
    .unwrap();
    let start = FockState::basis(m, 0b0001_0001).unwrap();
    let run = |bits: Option<PhaseBits>| {
        let mut s = start.clone();
        evolve_a2(&mut s, &A2Plan::new(dt, steps, Splitting::Strang2, A2Mode::Online(bits)).unwrap(), &h).unwrap();
        s
    };
    let exact = run(None);
    let pairs = 1.0;
    let mut previous = f64::INFINITY;
    let mut errors = Vec::new();
    for b in [4u32, 8, 12, 16, 24] {
        let approx = run(Some(PhaseBits::new(b)));
        let error = difference_norm(approx.amplitudes(), exact.amplitudes());
        let bound = steps as f64 * dt * pairs * strength * 2f64.powi(1 - b as i32);
        check(error <= previous + 1e-15, || format!("b={b}: error {error:e} above {previous:e}"))?;
        check(error <= bound, || format!("b={b}: error {error:e} exceeds bound {bound:e}"))?;
        previous = error;
        errors.push(format!("{b}:{error:.1e}"));
    }
    let xi = 0.9;
    let mut single = FockState::basis(m, 0b0010_0100).unwrap();
    online_diagonal_phase(&mut single, &PotentialField::zero(m), h.pair(), xi, None).unwrap();
    check(single.amplitude(0b0010_0100) == Complex64::cis(-xi / 3.0), || {
        format!("two-electron pair phase {:?}", single.amplitude(0b0010_0100))
    })?;
    Ok(format!("errors {}; e^(-i xi/3) exact", errors.join(" ")))
}

fn measurement_unification() -> Outcome {
    let (mut kv, mut kk, mut rr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..100u64 {
        let mut rng = random::rng(seed, random::streams::OBSERVABLE);
        let d = 1 + (seed as usize % 8);
        let a = Observable::new(random::hermitian(d, &mut rng)).unwrap();
        let t = rng.random_range(-6.0..6.0);
        let psi = random::state(d, &mut random::rng(seed, random::streams::STATE));
        let kit = kitaev_circuit(&a, t, &psi).unwrap();
        let vn = von_neumann_measure_for(&a, &psi, 2, t).unwrap();
        kv = kv.max(kit.max_deviation(&vn).unwrap());
        for (k, &lambda) in a.eigenvalues().iter().enumerate() {
            let eigen: Vec<Complex64> = a.eigenvectors().column(k).iter().copied().collect();
            let kit = kitaev_circuit(&a, t, &eigen).unwrap();
            kk = kk.max(kit.max_deviation(&phase_kickback_circuit(lambda, t)).unwrap());
            let h = ramsey_protocol(lambda, t, Pulse::Hadamard).distribution;
            let y = ramsey_protocol(lambda, t, Pulse::PiHalf).distribution;
            rr = rr.max((h[0] - y[1]).abs()).max((h[1] - y[0]).abs());
        }
    }
    check(kv <= 1e-12, || format!("kitaev vs pointer {kv:e}"))?;
    check(kk <= 1e-14, || format!("kickback vs kitaev {kk:e}"))?;
    check(rr <= 1e-12, || format!("ramsey relabelling {rr:e}"))?;
    let mut gen: f64 = 0.0;
    for seed in 0..10u64 {
        let a = Observable::new(random::hermitian(8, &mut random::rng(1000 + seed, random::streams::OBSERVABLE))).unwrap();
        for t in [0.1, 1.0, 10.0] {
            gen = gen.max(generator_identity_check(&a, t).unwrap());
        }
    }
    check(gen <= 1e-11, || format!("generator identity {gen:e}"))?;
    Ok(format!(
        "kitaev/vn {kv:.1e}, kickback/kitaev {kk:.1e}, ramsey {rr:.1e}, generator {gen:.1e}"
    ))
}

fn cosine_law_and_aliasing() -> Outcome {
    let (mut law, mut alias): (f64, f64) = (0.0, 0.0);
    for t in [0.3, 1.0, 2.5] {
        for i in 0..64 {
            let lambda = std::f64::consts::TAU * i as f64 / 64.0 / t;
            let r = phase_kickback_circuit(lambda, t);
            law = law.max((r.distribution[0] - cosine_law(lambda, t)).abs());
            let shifted = phase_kickback_circuit(lambda + alias_period(t), t);
            alias = alias.max(r.max_deviation(&shifted).unwrap());
        }
    }
    check(law <= 1e-12, || format!("cosine law {law:e}"))?;
    check(alias <= 1e-14, || format!("aliasing {alias:e}"))?;
    Ok(format!("cosine law {law:.1e}, aliasing {alias:.1e}"))
}

fn pointer_readout() -> Outcome {
    let mut worst: f64 = 1.0;
    for seed in 0..20u64 {
        let mut rng = random::rng(seed, random::streams::OBSERVABLE);
        let d = 8;
        let values: Vec<f64> = (0..d).map(|_| rng.random_range(0..8) as f64).collect();
        let u = random::unitary(d, &mut rng);
        let diag = CMatrix::from_fn(d, d, |i, j| Complex64::new(if i == j { values[i] } else { 0.0 }, 0.0));
        let a = Observable::new(&u * diag * u.adjoint()).unwrap();
        for (k, &lambda) in values.iter().enumerate() {
            let eigen: Vec<Complex64> = u.column(k).iter().copied().collect();
            let r = von_neumann_measure(&a, &eigen, 8).unwrap();
            worst = worst.min(r.distribution[lambda as usize]);
        }
    }
    check(worst >= 1.0 - 1e-12, || format!("min P(x=lambda) {worst}"))?;
    Ok(format!("min P(x=lambda) = 1-{:.1e}", 1.0 - worst))
}

fn fockforge(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_fockforge"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn ceil_log2(m: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < m {
        bits += 1;
    }
    bits
}

fn resource_claims() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rows_checked = 0;
    for m in 2..=10usize {
        for n in 1..=m.min(4) {
            let path = dir.path().join(format!("r{m}_{n}.conf"));
            std::fs::write(&path, format!("lattice.sites = {m}\nlattice.particles = {n}\nplan.bits = 16\n"))
                .map_err(|e| e.to_string())?;
            let text = String::from_utf8(fockforge(&["resources", "--config", path.to_str().unwrap(), "--out", "-"])?)
                .map_err(|e| e.to_string())?;
            for line in text.lines().filter(|l| !l.starts_with('#')) {
                let f: Vec<&str> = line.split('\t').collect();
                let qubits: usize = f[1].parse().unwrap();
                let one_body: usize = f[2].parse().unwrap();
                let expected = match f[0] {
                    "a1" => n * ceil_log2(m),
                    _ => m,
                };
                check(qubits == expected, || format!("({m},{n}) {} qubits {qubits} != {expected}", f[0]))?;
                check(one_body == m * (m - 1) / 2 + m, || format!("({m},{n}) one-body count {one_body}"))?;
                rows_checked += 1;
            }
        }
    }
    let dir_data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let golden = std::fs::read(dir_data.join("resources_m8_n2.tsv")).map_err(|e| e.to_string())?;
    let fresh = fockforge(&[
        "resources",
        "--config",
        dir_data.join("resources_m8_n2.conf").to_str().unwrap(),
        "--out",
        "-",
    ])?;
    check(fresh == golden, || "golden file mismatch".into())?;
    Ok(format!("{rows_checked} rows over the (M,N) grid, golden file identical"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("d.conf");
    std::fs::write(
        &config,
        "plan.algo = a2-online\nplan.bits = 12\nplan.steps = 8\nmeasurement.times = 1, 0.5\nmeasurement.shots = 256\n",
    )
    .map_err(|e| e.to_string())?;
    let config = config.to_str().unwrap();
    let commands: [&[&str]; 7] = [
        &["spectrum", "--cross-check"],
        &["evolve"],
        &["compare"],
        &["measure"],
        &["measure", "--all"],
        &["measure", "--estimate"],
        &["resources"],
    ];
    for args in commands {
        let mut full = args.to_vec();
        full.extend(["--config", config, "--seed", "2024", "--out", "-"]);
        let first = fockforge(&full)?;
        let second = fockforge(&full)?;
        check(first == second, || format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("canonical algebra", canonical_algebra, Duration::from_secs(5)),
        ("plucker/determinant equivalence", plucker_equivalence, Duration::from_secs(10)),
        ("representation equivalence", representation_equivalence, Duration::from_secs(30)),
        ("trotter convergence", trotter_convergence, Duration::from_secs(60)),
        ("online-mode fidelity", online_fidelity, Duration::from_secs(30)),
        ("measurement-scheme unification", measurement_unification, Duration::from_secs(20)),
        ("cosine law and aliasing", cosine_law_and_aliasing, Duration::from_secs(5)),
        ("pointer readout", pointer_readout, Duration::from_secs(5)),
        ("resource claims", resource_claims, Duration::from_secs(2)),
        ("determinism", determinism, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, criterion, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = criterion();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= *budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({elapsed:.2?}): {reason}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
