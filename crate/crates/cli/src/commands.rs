use fockforge_core::bridge::{antisymmetric_spectrum, compare_evolutions, first_to_fock, CompareSetup};
use fockforge_core::firstq::{evolve_a1, qubit_cost_a1, slater_state, A1Plan, FirstQuantState};
use fockforge_core::fixedpoint::{PhaseBits, MAX_BITS};
use fockforge_core::fock::{
    build_hamiltonian_matrix, evolve_a2, qubit_cost_a2, A2Mode, A2Plan, FockState, SecondQuantHamiltonian,
    SectorBasis,
};
use fockforge_core::lattice::{dft_matrix, KineticMatrix, MomentumTransform, PairInteraction, PotentialField};
use fockforge_core::measure::{
    eigen_mixture, estimate_eigenvalue, kitaev_circuit, phase_kickback_circuit, ramsey_protocol,
    von_neumann_measure, von_neumann_measure_for, Observable, Pulse, Scheme,
};
use fockforge_core::{oracle, random, CMatrix, Complex64};

use crate::config::{Algo, ExperimentConfig, ObservableKind, OrbitalBasis, StateKind};
use crate::error::{CliError, ConfigError};
use crate::output::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum { cross_check: bool },
    Evolve,
    Compare,
    Measure { all: bool, estimate: bool },
    Resources,
}

pub fn run(command: Command, config: &ExperimentConfig) -> Result<Table, CliError> {
    match command {
        Command::Spectrum { cross_check } => spectrum(config, cross_check),
        Command::Evolve => evolve(config),
        Command::Compare => compare(config),
        Command::Measure { estimate: true, .. } => estimate(config),
        Command::Measure { all, .. } => measure(config, all),
        Command::Resources => Ok(resources(config)),
    }
}

pub fn hamiltonian(config: &ExperimentConfig) -> Result<SecondQuantHamiltonian, CliError> {
    let spec = config.lattice_spec();
    let h = &config.hamiltonian;
    Ok(SecondQuantHamiltonian::new(
        KineticMatrix::nearest_neighbour(&spec, h.hopping)?,
        PotentialField::new(h.potential.values(spec.sites()))?,
        PairInteraction::coulomb(&spec, h.coulomb)?,
    )?)
}

fn orbital_basis(config: &ExperimentConfig) -> CMatrix {
    let m = config.lattice.sites;
    match config.plan.basis {
        OrbitalBasis::Position => CMatrix::identity(m, m),
        OrbitalBasis::Momentum => dft_matrix(m),
    }
}

fn phase_bits(config: &ExperimentConfig) -> Option<PhaseBits> {
    config
        .plan
        .bits
        .map(|b| PhaseBits::with_path(b, config.plan.inv_distance))
}

fn spectrum(config: &ExperimentConfig, cross_check: bool) -> Result<Table, CliError> {
    let h = hamiltonian(config)?;
    let (m, n) = (config.lattice.sites, config.lattice.particles);
    let sector = SectorBasis::new(m, n)?;
    let values = oracle::exact_spectrum(&build_hamiltonian_matrix(&h, Some(&sector))?)?;
    if !cross_check {
        let mut table = Table::new(&["index", "eigenvalue"]);
        for (i, v) in values.iter().enumerate() {
            table.push(vec![i.to_string(), num(*v)]);
        }
        return Ok(table);
    }
    let h_first =
        oracle::first_quant_hamiltonian_dense(m, n, h.kinetic().entries(), h.potential().values(), h.pair().values())?;
    let first = antisymmetric_spectrum(&h_first, m, n)?;
    let mut table = Table::new(&["index", "eigenvalue", "first_quantized", "deviation"]);
    for (i, (a, b)) in values.iter().zip(&first).enumerate() {
        table.push(vec![i.to_string(), num(*a), num(*b), num((a - b).abs())]);
    }
    Ok(table)
}

fn evolve(config: &ExperimentConfig) -> Result<Table, CliError> {
    let h = hamiltonian(config)?;
    let (m, n) = (config.lattice.sites, config.lattice.particles);
    let plan = &config.plan;
    let start = slater_state(&orbital_basis(config), &config.orbitals())?;
    let mut columns = vec!["step".to_string(), "time".into(), "fidelity".into()];
    columns.extend((0..m).map(|p| format!("n{p}")));
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    let mut push = |step: usize, fidelity: f64, occupations: Vec<f64>| {
        let mut row = vec![step.to_string(), num(step as f64 * plan.dt), num(fidelity)];
        row.extend(occupations.into_iter().map(num));
        table.rows.push(row);
    };
    if plan.dt == 0.0 {
        let occupations = match plan.algo {
            Algo::A1 => start.occupations(),
            Algo::A2 | Algo::A2Online => first_to_fock(&start)?.occupations(),
        };
        for step in 0..=plan.steps {
            push(step, 1.0, occupations.clone());
        }
        return Ok(table);
    }

    match plan.algo {
        Algo::A1 => {
            let h_first = oracle::first_quant_hamiltonian_dense(
                m,
                n,
                h.kinetic().entries(),
                h.potential().values(),
                h.pair().values(),
            )?;
            let u = oracle::dense_expm(&h_first, plan.dt)?;
            let transform = MomentumTransform::new(h.kinetic())?;
            let mut exact = CMatrix::from_column_slice(start.amplitudes().len(), 1, start.amplitudes());
            let mut state = start.clone();
            push(0, 1.0, state.occupations());
            for step in 1..=plan.steps {
                let step_plan = A1Plan::new(plan.dt, 1, plan.splitting, phase_bits(config))?;
                evolve_a1(&mut state, &step_plan, h.potential(), h.pair(), &transform)?;
                exact = &u * exact;
                let reference = FirstQuantState::from_amplitudes(n, m, exact.as_slice().to_vec())?;
                push(step, reference.overlap(&state)?.norm(), state.occupations());
            }
        }
        Algo::A2 | Algo::A2Online => {
            let sector = SectorBasis::new(m, n)?;
            let u = oracle::dense_expm(&build_hamiltonian_matrix(&h, Some(&sector))?, plan.dt)?;
            let mode = match plan.algo {
                Algo::A2Online => A2Mode::Online(phase_bits(config)),
                _ => A2Mode::Precomputed,
            };
            let mut state = first_to_fock(&start)?;
            let coefficients = state.sector_amplitudes(&sector);
            let mut exact = CMatrix::from_column_slice(coefficients.len(), 1, &coefficients);
            push(0, 1.0, state.occupations());
            for step in 1..=plan.steps {
                evolve_a2(&mut state, &A2Plan::new(plan.dt, 1, plan.splitting, mode)?, &h)?;
                exact = &u * exact;
                let reference = FockState::from_sector(&sector, exact.as_slice())?;
                push(step, reference.overlap(&state)?.norm(), state.occupations());
            }
        }
    }
    Ok(table)
}

fn compare(config: &ExperimentConfig) -> Result<Table, CliError> {
    let plan = &config.plan;
    let report = compare_evolutions(&CompareSetup {
        hamiltonian: hamiltonian(config)?,
        orbital_basis: orbital_basis(config),
        orbitals: config.orbitals(),
        time: plan.dt * plan.steps as f64,
        steps: plan.steps.max(1),
        splitting: plan.splitting,
    })?;
    let mut table = Table::new(&["metric", "value"]);
    for (name, value) in [
        ("oracle", report.oracle),
        ("trotter", report.trotter),
        ("a1_vs_oracle", report.a1_vs_oracle),
        ("a2_vs_oracle", report.a2_vs_oracle),
    ] {
        table.push(vec![name.into(), num(value)]);
    }
    Ok(table)
}

fn observable(config: &ExperimentConfig) -> Result<Observable, CliError> {
    let m = &config.measurement;
    let seed = m.seed;
    Ok(match m.observable {
        ObservableKind::Random => Observable::new(random::hermitian(
            m.dimension,
            &mut random::rng(seed, random::streams::OBSERVABLE),
        ))?,
        ObservableKind::Hamiltonian => {
            let sector = SectorBasis::new(config.lattice.sites, config.lattice.particles)?;
            Observable::new(build_hamiltonian_matrix(&hamiltonian(config)?, Some(&sector))?)?
        }
        ObservableKind::Diagonal => Observable::diagonal(m.eigenvalues.as_deref().unwrap_or_default())?,
    })
}

fn system_state(config: &ExperimentConfig, a: &Observable) -> Result<Vec<Complex64>, CliError> {
    let d = a.dim();
    let out_of_range = |k: usize| {
        CliError::Config(ConfigError::new(
            None,
            "measurement.state",
            format!("index {k} exceeds observable dimension {d}"),
        ))
    };
    match config.measurement.state {
        StateKind::Random => Ok(random::state(
            d,
            &mut random::rng(config.measurement.seed, random::streams::STATE),
        )),
        StateKind::Eigen(k) if k < d => Ok(a.eigenvectors().column(k).iter().copied().collect()),
        StateKind::Basis(k) if k < d => {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            v[k] = Complex64::new(1.0, 0.0);
            Ok(v)
        }
        StateKind::Eigen(k) | StateKind::Basis(k) => Err(out_of_range(k)),
    }
}

fn relabel(p: &[f64], pulse: Pulse) -> Vec<f64> {
    match pulse {
        Pulse::Hadamard => p.to_vec(),
        Pulse::PiHalf => p.iter().rev().copied().collect(),
    }
}

fn measure(config: &ExperimentConfig, all: bool) -> Result<Table, CliError> {
    let m = &config.measurement;
    let a = observable(config)?;
    let psi = system_state(config, &a)?;
    let t = m.times[0];
    let kickback = |lambda: f64| phase_kickback_circuit(lambda, t);
    let ramsey = |lambda: f64| ramsey_protocol(lambda, t, m.pulse);

    if all {
        let kitaev = kitaev_circuit(&a, t, &psi)?.distribution;
        let rows = [
            (Scheme::VonNeumann, von_neumann_measure_for(&a, &psi, 2, t)?.distribution, false),
            (Scheme::Kitaev, kitaev.clone(), false),
            (Scheme::Kickback, eigen_mixture(&a, &psi, kickback)?, false),
            (Scheme::Ramsey, eigen_mixture(&a, &psi, ramsey)?, true),
        ];
        let mut table = Table::new(&["scheme", "p0", "p1", "max_dev_vs_kitaev"]);
        for (scheme, dist, relabelled) in rows {
            let compared = if relabelled { relabel(&dist, m.pulse) } else { dist.clone() };
            let deviation = compared.iter().zip(&kitaev).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            table.push(vec![scheme.name().into(), num(dist[0]), num(dist[1]), num(deviation)]);
        }
        return Ok(table);
    }

    let distribution = match m.scheme {
        Scheme::VonNeumann => von_neumann_measure(&a, &psi, m.pointer)?.distribution,
        Scheme::Kitaev => kitaev_circuit(&a, t, &psi)?.distribution,
        Scheme::Kickback => match m.lambda {
            Some(lambda) => kickback(lambda).distribution,
            None => eigen_mixture(&a, &psi, kickback)?,
        },
        Scheme::Ramsey => match m.lambda {
            Some(lambda) => ramsey(lambda).distribution,
            None => eigen_mixture(&a, &psi, ramsey)?,
        },
    };
    let mut table = Table::new(&["outcome", "probability"]);
    for (x, p) in distribution.iter().enumerate() {
        table.push(vec![x.to_string(), num(*p)]);
    }
    Ok(table)
}

fn estimate(config: &ExperimentConfig) -> Result<Table, CliError> {
    let m = &config.measurement;
    let a = observable(config)?;
    let psi = system_state(config, &a)?;
    let mut rng = random::rng(m.seed, random::streams::SAMPLING);
    let est = estimate_eigenvalue(&a, &psi, &m.times, m.shots, &mut rng)?;
    let mut table = Table::new(&["estimate", "window"]);
    table.push(vec![num(est.value), num(est.window)]);
    Ok(table)
}

/// Qubits, per-step exponential counts and online arithmetic for the three
/// algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceRow {
    pub algo: Algo,
    pub qubits: usize,
    pub one_body_terms: usize,
    pub pair_terms: usize,
    /// `b²·N(N−1)/2` for the online path.
    pub arithmetic: Option<u64>,
    pub scales_with_electrons: bool,
}

pub fn resource_rows(sites: usize, particles: usize, bits: u32) -> Vec<ResourceRow> {
    let one_body = sites * (sites - 1) / 2 + sites;
    let electron_pairs = particles * particles.saturating_sub(1) / 2;
    vec![
        ResourceRow {
            algo: Algo::A1,
            qubits: qubit_cost_a1(sites, particles),
            one_body_terms: one_body,
            pair_terms: electron_pairs,
            arithmetic: None,
            scales_with_electrons: true,
        },
        ResourceRow {
            algo: Algo::A2,
            qubits: qubit_cost_a2(sites),
            one_body_terms: one_body,
            pair_terms: sites * (sites - 1) / 2,
            arithmetic: None,
            scales_with_electrons: false,
        },
        ResourceRow {
            algo: Algo::A2Online,
            qubits: qubit_cost_a2(sites),
            one_body_terms: one_body,
            pair_terms: electron_pairs,
            arithmetic: Some(u64::from(bits).pow(2) * electron_pairs as u64),
            scales_with_electrons: true,
        },
    ]
}

fn resources(config: &ExperimentConfig) -> Table {
    let bits = config.plan.bits.unwrap_or(MAX_BITS);
    let mut table = Table::new(&[
        "algo",
        "qubits",
        "one_body_terms",
        "pair_terms",
        "bits",
        "arithmetic",
        "spatial_scaling",
    ]);
    for row in resource_rows(config.lattice.sites, config.lattice.particles, bits) {
        table.push(vec![
            row.algo.name().into(),
            row.qubits.to_string(),
            row.one_body_terms.to_string(),
            row.pair_terms.to_string(),
            bits.to_string(),
            row.arithmetic.map_or_else(|| "-".into(), |a| a.to_string()),
            if row.scales_with_electrons { "electrons" } else { "sites" }.into(),
        ]);
    }
    table
}
