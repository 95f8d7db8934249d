use gwsi::measures::{
    attach_channel, cond_entropy, cond_mutual_info, entropy, mutual_info, validate_pmf, Alphabet, AuxChannel,
    JointPmf, MeasureError, PmfViolation, Var,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn normalize(mut p: Vec<f64>) -> Vec<f64> {
    if p.iter().all(|&x| x == 0.0) {
        p[0] = 1.0;
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

/// Joint pmf over `(X, Y, U)` with a few zero cells.
fn pmf_xyu() -> impl Strategy<Value = JointPmf> {
    (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(a, b, c)| {
        prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0f64..1.0], a * b * c).prop_map(move |p| {
            let vars = vec![Alphabet::new(Var::X, a), Alphabet::new(Var::Y, b), Alphabet::new(Var::U, c)];
            JointPmf::new(vars, normalize(p)).unwrap()
        })
    })
}

fn channel_from(pmf: &JointPmf, k: usize, raw: &[f64]) -> AuxChannel {
    let inputs: Vec<Alphabet> = pmf.vars()[..2].to_vec();
    let rows: usize = inputs.iter().map(|a| a.size).product();
    let kernel: Vec<f64> = (0..rows).flat_map(|r| normalize(raw[r * k..(r + 1) * k].to_vec())).collect();
    AuxChannel::new(inputs, vec![Alphabet::new(Var::W, k)], kernel).unwrap()
}

/// `-sum p log2 p` straight from the table, with marginalization by index.
fn oracle_entropy(pmf: &JointPmf, keep: &[usize]) -> f64 {
    let sizes = pmf.sizes();
    let mut acc = std::collections::HashMap::<Vec<usize>, f64>::new();
    for (flat, &p) in pmf.probs().iter().enumerate() {
        let mut idx = vec![0; sizes.len()];
        let mut rest = flat;
        for d in (0..sizes.len()).rev() {
            idx[d] = rest % sizes[d];
            rest /= sizes[d];
        }
        *acc.entry(keep.iter().map(|&d| idx[d]).collect()).or_default() += p;
    }
    acc.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn entropy_matches_oracle(p in pmf_xyu()) {
        use Var::*;
        for (vars, axes) in [(vec![X], vec![0]), (vec![Y, U], vec![1, 2]), (vec![X, Y, U], vec![0, 1, 2])] {
            let h = entropy(&p, &vars).unwrap();
            prop_assert!((h - oracle_entropy(&p, &axes)).abs() < TOL);
        }
    }

    #[test]
    fn chain_rule(p in pmf_xyu()) {
        use Var::*;
        let joint = entropy(&p, &[X, Y, U]).unwrap();
        let chain = entropy(&p, &[X]).unwrap()
            + cond_entropy(&p, &[Y], &[X]).unwrap()
            + cond_entropy(&p, &[U], &[X, Y]).unwrap();
        prop_assert!((joint - chain).abs() < TOL);
        let i = mutual_info(&p, &[X], &[Y, U]).unwrap();
        let split = mutual_info(&p, &[X], &[Y]).unwrap() + cond_mutual_info(&p, &[X], &[U], &[Y]).unwrap();
        prop_assert!((i - split).abs() < TOL);
    }

    #[test]
    fn nonnegative_and_symmetric(p in pmf_xyu()) {
        use Var::*;
        prop_assert!(cond_entropy(&p, &[X], &[Y, U]).unwrap() >= -TOL);
        let i = mutual_info(&p, &[X], &[Y]).unwrap();
        prop_assert!(i >= -TOL);
        prop_assert!((i - mutual_info(&p, &[Y], &[X]).unwrap()).abs() < TOL);
        prop_assert!(cond_mutual_info(&p, &[X], &[Y], &[U]).unwrap() >= -TOL);
        // Conditioning reduces entropy.
        prop_assert!(cond_entropy(&p, &[X], &[Y]).unwrap() <= entropy(&p, &[X]).unwrap() + TOL);
    }

    #[test]
    fn uniform_is_maximal(p in pmf_xyu()) {
        let n = p.card(Var::X).unwrap();
        prop_assert!(entropy(&p, &[Var::X]).unwrap() <= (n as f64).log2() + TOL);
        let uniform = JointPmf::new(vec![Alphabet::new(Var::X, n)], vec![1.0 / n as f64; n]).unwrap();
        prop_assert!((entropy(&uniform, &[Var::X]).unwrap() - (n as f64).log2()).abs() < TOL);
    }

    #[test]
    fn attached_output_is_markov(
        p in pmf_xyu(),
        k in 1usize..=4,
        raw in prop::collection::vec(0.0f64..1.0, 36),
    ) {
        use Var::*;
        let ch = channel_from(&p, k, &raw);
        let joint = attach_channel(&p, &ch).unwrap();
        prop_assert!(cond_mutual_info(&joint, &[W], &[U], &[X, Y]).unwrap().abs() < TOL);
        let back = joint.marginal(&[X, Y, U]).unwrap().permuted(&[X, Y, U]).unwrap();
        for (a, b) in back.probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // Data processing through the channel.
        prop_assert!(mutual_info(&joint, &[W], &[U]).unwrap() <= mutual_info(&joint, &[X, Y], &[U]).unwrap() + TOL);
    }

    #[test]
    fn deterministic(p in pmf_xyu()) {
        let a = entropy(&p, &[Var::X, Var::U]).unwrap();
        let b = entropy(&p.clone(), &[Var::X, Var::U]).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn binary_entropy_values() {
    // h(1/4) = 2 - (3/4) log2 3.
    let p = JointPmf::new(vec![Alphabet::new(Var::X, 2)], vec![0.25, 0.75]).unwrap();
    let h = entropy(&p, &[Var::X]).unwrap();
    assert!((h - (2.0 - 0.75 * 3f64.log2())).abs() < 1e-12);
    assert!((h - 0.811278124459).abs() < 1e-12);
    // h(0.2) and 1 + h(0.3).
    assert!((h2(0.2) - 0.721928094887).abs() < 1e-12);
    assert!((1.0 + h2(0.3) - 1.881290899231).abs() < 1e-12);
}

#[test]
fn dsbs_mutual_information() {
    let q = 0.25;
    let p = JointPmf::new(
        vec![Alphabet::new(Var::X, 2), Alphabet::new(Var::Y, 2)],
        vec![(1.0 - q) / 2.0, q / 2.0, q / 2.0, (1.0 - q) / 2.0],
    )
    .unwrap();
    assert!((mutual_info(&p, &[Var::X], &[Var::Y]).unwrap() - (1.0 - h2(q))).abs() < 1e-12);
    assert!((entropy(&p, &[Var::X, Var::Y]).unwrap() - (1.0 + h2(q))).abs() < 1e-12);
}

#[test]
fn rejects_bad_pmfs() {
    let vars = [Alphabet::new(Var::X, 2)];
    assert!(matches!(validate_pmf(&vars, &[0.5, 0.4]), Err(PmfViolation::Mass { .. })));
    assert!(validate_pmf(&vars, &[1.5, -0.5]).is_err());
    assert!(validate_pmf(&vars, &[f64::NAN, 1.0]).is_err());
    assert!(validate_pmf(&vars, &[1.0]).is_err());
    assert!(matches!(
        JointPmf::new(vars.to_vec(), vec![0.9, 0.0]),
        Err(MeasureError::Invalid(PmfViolation::Mass { .. }))
    ));
}

#[test]
fn unknown_variable_is_an_error() {
    let p = JointPmf::new(vec![Alphabet::new(Var::X, 2)], vec![0.5, 0.5]).unwrap();
    assert!(entropy(&p, &[Var::W]).is_err());
    assert!(mutual_info(&p, &[Var::X], &[Var::X]).is_err());
}
