use hpmf_core::hpmf::{run_hpmf, run_hpmf_with_probe, HpmfConfig, HpmfError, ModeState, ObservationMask, ObservationProblem, Probe};
use hpmf_core::imaging::synthetic::{piecewise_low_rank, separable};
use hpmf_core::imaging::{make_observation, rse, SamplingSpec};
use hpmf_core::priors::RankProfile;
use hpmf_core::tensor::{DenseTensor, Shape};

fn quiet(cfg: &mut HpmfConfig) {
    cfg.record_timing = false;
}

#[test]
fn full_observation_single_iteration_is_exact() {
    let img = piecewise_low_rank(12, 10, 2);
    let problem = ObservationProblem::fully_observed(img.tensor().clone());
    let mut cfg = HpmfConfig::defaults(3);
    cfg.max_iters = 1;
    let rep = run_hpmf(&problem, &cfg).unwrap();
    assert_eq!(rep.recovered, *img.tensor());
    assert_eq!(rep.iterations, 1);
    assert_eq!(rep.trace.len(), 1);
}

#[test]
fn rank_one_separable_beats_zero_fill() {
    let img = separable(24, 8);
    let problem = make_observation(&img, &SamplingSpec::uniform(0.5, 42)).unwrap();
    let rep = run_hpmf(&problem, &HpmfConfig::defaults(3)).unwrap();
    let zero_fill = rse(&problem.zero_filled(), img.tensor()).unwrap();
    let got = rse(&rep.recovered, img.tensor()).unwrap();
    assert!(got < zero_fill, "{got} vs {zero_fill}");
}

#[test]
fn rank_two_piecewise_converges() {
    let img = piecewise_low_rank(20, 20, 2);
    let problem = make_observation(&img, &SamplingSpec::uniform(0.4, 42)).unwrap();
    let cfg = HpmfConfig::defaults(3);
    let rep = run_hpmf(&problem, &cfg).unwrap();
    assert!(rep.converged);
    assert!(rep.iterations > 1 && rep.iterations <= 500);
    assert_eq!(rep.trace.len(), rep.iterations);
    assert!(rep.trace.last().unwrap().relative_change < 1e-5);
    assert!(rse(&rep.recovered, img.tensor()).unwrap() < rse(&problem.zero_filled(), img.tensor()).unwrap());
}

#[derive(Default)]
struct Watch {
    penalties: Vec<Vec<[f64; 4]>>,
    fidelity: bool,
    checked: usize,
    problem: Option<ObservationProblem<f64>>,
}

impl Probe<f64> for Watch {
    fn iterate(&mut self, _iteration: usize, x: &DenseTensor<f64>, states: &[ModeState<f64>]) {
        let p = self.problem.as_ref().unwrap();
        self.fidelity &= p.agrees_on_observed(x);
        self.checked += 1;
        self.penalties.push(
            states
                .iter()
                .map(|s| {
                    let q = s.penalties;
                    [q.beta_u, q.beta_v, q.omega_u, q.omega_v]
                })
                .collect(),
        );
    }
}

#[test]
fn penalties_grow_to_the_cap_and_data_stays_pinned() {
    let img = piecewise_low_rank(12, 12, 2);
    let problem = make_observation(&img, &SamplingSpec::uniform(0.4, 7)).unwrap();
    let mut cfg = HpmfConfig::defaults(3);
    cfg.rank_override = Some(RankProfile::new(vec![3, 3, 3]));
    cfg.tol = 1e-300;
    cfg.max_iters = 60;
    cfg.mu = 1.5;
    cfg.penalty_cap = 2000.0;
    let mut watch = Watch {
        fidelity: true,
        problem: Some(problem.clone()),
        ..Default::default()
    };
    let rep = run_hpmf_with_probe(&problem, &cfg, &mut watch).unwrap();
    assert_eq!(rep.iterations, 60);
    assert!(watch.fidelity);
    assert_eq!(watch.checked, 60);
    let cap = cfg.penalty_cap * cfg.penalty_factor();
    for pair in watch.penalties.windows(2) {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            for (x, y) in a.iter().zip(b) {
                assert!(y >= x && *y <= cap);
            }
        }
    }
    // every penalty has saturated by now
    assert!(watch.penalties.last().unwrap().iter().flatten().all(|&p| p == cap));
}

#[test]
fn runs_are_deterministic() {
    let img = piecewise_low_rank(14, 12, 2);
    let problem = make_observation(&img, &SamplingSpec::uniform(0.3, 42)).unwrap();
    let mut cfg = HpmfConfig::defaults(3);
    quiet(&mut cfg);
    cfg.max_iters = 40;
    let a = run_hpmf(&problem, &cfg).unwrap();
    let b = run_hpmf(&problem, &cfg).unwrap();
    assert_eq!(a.recovered, b.recovered);
    assert_eq!(a.trace, b.trace);
    assert!(a.trace.iter().all(|r| r.wall_seconds == 0.0));
}

#[test]
fn parallel_sweep_matches_sequential() {
    let img = piecewise_low_rank(14, 12, 2);
    let problem = make_observation(&img, &SamplingSpec::uniform(0.3, 5)).unwrap();
    let mut cfg = HpmfConfig::defaults(3);
    quiet(&mut cfg);
    cfg.max_iters = 25;
    let seq = run_hpmf(&problem, &cfg).unwrap();
    cfg.parallel = true;
    let par = run_hpmf(&problem, &cfg).unwrap();
    assert_eq!(seq.recovered, par.recovered);
    assert_eq!(seq.trace, par.trace);
}

#[test]
fn degenerate_modes_run() {
    // a single row, so mode 1 has I_n = 1 and an empty TV matrix
    let shape = Shape::new(vec![1, 9, 3]).unwrap();
    let t = DenseTensor::from_fn(shape.clone(), |idx| 0.2 + 0.05 * (idx[1] + idx[2]) as f64);
    let observed: Vec<bool> = (0..27).map(|i| i % 2 == 0).collect();
    let problem = ObservationProblem::new(t, ObservationMask::new(shape, observed).unwrap()).unwrap();
    let mut cfg = HpmfConfig::defaults(3);
    cfg.max_iters = 20;
    let rep = run_hpmf(&problem, &cfg).unwrap();
    assert_eq!(rep.ranks[0], 1);
    assert!(rep.recovered.is_finite());

    let img = piecewise_low_rank(10, 10, 2);
    let problem = make_observation(&img, &SamplingSpec::uniform(0.5, 3)).unwrap();
    cfg.rank_override = Some(RankProfile::new(vec![1, 1, 1]));
    let rep = run_hpmf(&problem, &cfg).unwrap();
    assert_eq!(rep.ranks, vec![1, 1, 1]);
    assert!(rep.recovered.is_finite());
}

#[test]
fn single_precision_runs() {
    let img = piecewise_low_rank(12, 12, 2);
    let t32: DenseTensor<f32> = DenseTensor::from_vec(img.tensor().shape().clone(), img.tensor().as_slice().iter().map(|&v| v as f32).collect()).unwrap();
    let p64 = make_observation(&img, &SamplingSpec::uniform(0.5, 42)).unwrap();
    let problem = ObservationProblem::new(t32.clone(), p64.mask().clone()).unwrap();
    let mut cfg = HpmfConfig::defaults(3);
    cfg.delta = 0.2;
    cfg.max_iters = 50;
    let rep = run_hpmf(&problem, &cfg).unwrap();
    assert!(rse(&rep.recovered, &t32).unwrap() < rse(&problem.zero_filled(), &t32).unwrap());
}

#[test]
fn invalid_inputs_are_rejected() {
    let shape = Shape::new(vec![4, 4, 3]).unwrap();
    let t = DenseTensor::from_fn(shape.clone(), |idx| idx[0] as f64);
    assert_eq!(
        ObservationProblem::new(t.clone(), ObservationMask::new(shape.clone(), vec![false; 48]).unwrap()).unwrap_err(),
        HpmfError::EmptyObservation
    );
    let problem = ObservationProblem::fully_observed(t.clone());
    let mut cfg = HpmfConfig::defaults(3);
    cfg.alpha = vec![0.5, 0.5, 0.5];
    assert!(matches!(run_hpmf(&problem, &cfg), Err(HpmfError::Config(_))));
    let mut cfg = HpmfConfig::defaults(3);
    cfg.rank_override = Some(RankProfile::new(vec![5, 1, 1]));
    assert!(matches!(run_hpmf(&problem, &cfg), Err(HpmfError::RankEstimation(_))));

    let mut bad = t;
    bad.set(&[1, 1, 1], f64::NAN);
    let err = run_hpmf(&ObservationProblem::fully_observed(bad), &HpmfConfig::defaults(3)).unwrap_err();
    assert!(err.is_numerical(), "{err}");
}
