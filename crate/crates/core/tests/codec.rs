use gwsi::codec::{
    code_joint, gen_codebooks, simulate, strongly_typical, CodeParams, Codec, CodecError, Event, Simulator,
};
use gwsi::measures::{Alphabet, AuxChannel, JointPmf, Var};
use gwsi::sources;
use proptest::prelude::*;

fn xy_inputs(nx: usize, ny: usize) -> Vec<Alphabet> {
    vec![Alphabet::new(Var::X, nx), Alphabet::new(Var::Y, ny)]
}

fn params(n: usize, book: [f64; 3], bins: [f64; 3], seed: u64) -> CodeParams {
    CodeParams {
        n,
        rate0p: book[0],
        rate1p: book[1],
        rate2p: book[2],
        rate0: bins[0],
        rate1: bins[1],
        rate2: bins[2],
        epsilon: 0.5,
        seed,
    }
}

#[test]
fn typicality_examples() {
    let p = JointPmf::new(vec![Alphabet::new(Var::X, 2)], vec![0.25, 0.75]).unwrap();
    // Counts (1, 3) match exactly; (2, 2) is off by 0.25 against a slack of
    // 0.2 * 0.25 = 0.05.
    assert!(strongly_typical(&[&[0, 1, 1, 1]], &p, 0.2).unwrap());
    assert!(!strongly_typical(&[&[0, 0, 1, 1]], &p, 0.2).unwrap());
    assert!(strongly_typical(&[&[0, 0, 1, 1]], &p, 1.0).unwrap());
    let point = JointPmf::new(vec![Alphabet::new(Var::X, 2)], vec![1.0, 0.0]).unwrap();
    // A symbol of zero mass is never typical, whatever the slack.
    assert!(!strongly_typical(&[&[0, 0, 0, 1]], &point, 100.0).unwrap());
    assert!(matches!(
        strongly_typical(&[&[0, 1], &[0]], &p, 0.2),
        Err(CodecError::Length { index: 1, expected: 2, actual: 1 }) | Err(CodecError::Params(_))
    ));
}

#[test]
fn rates_map_to_bits() {
    let p = params(10, [0.3, 0.25, 0.0], [0.3, 0.2, 0.0], 0);
    assert_eq!(p.codebook_bits(0.3), 3);
    assert_eq!(p.codebook_bits(0.25), 3);
    assert_eq!(p.bin_bits(0.25), 2);
    assert_eq!(p.bin_bits(0.3), 3);
    assert!(p.validate().is_ok());
    assert!(params(10, [0.1, 0.0, 0.0], [0.3, 0.0, 0.0], 0).validate().is_err());
    assert!(matches!(params(20, [1.5, 0.0, 0.0], [0.0; 3], 0).validate(), Err(CodecError::TooLarge { .. })));
}

#[test]
fn codeword_symbols_concentrate() {
    // Each W codeword symbol is Bern(0.75)-distributed over {1, 0}; across
    // 100 seeds of 2^6 codewords of length 12 the zero fraction has standard
    // deviation about sqrt(0.1875 / 76800) < 0.0016.
    let src = sources::dsbs(0.5).unwrap();
    let ch = AuxChannel::new(xy_inputs(2, 2), vec![Alphabet::new(Var::W, 2)], [0.25, 0.75].repeat(4)).unwrap();
    let joint = code_joint(&src, &ch).unwrap();
    let (mut zeros, mut total) = (0usize, 0usize);
    for seed in 0..100 {
        let books = gen_codebooks(&joint, &params(12, [0.5, 0.0, 0.0], [0.0; 3], seed)).unwrap();
        assert_eq!(books.cw.len(), 64);
        zeros += books.cw.symbols.iter().filter(|&&s| s == 0).count();
        total += books.cw.symbols.len();
    }
    let frac = zeros as f64 / total as f64;
    assert!((frac - 0.25).abs() < 0.01, "zero fraction {frac}");
}

#[test]
fn bins_partition_the_codebook() {
    let src = sources::dsbs(0.25).unwrap();
    let ch = AuxChannel::constant(xy_inputs(2, 2), Var::W);
    let books = gen_codebooks(&code_joint(&src, &ch).unwrap(), &params(8, [0.0, 1.0, 1.0], [0.0, 0.5, 0.25], 3)).unwrap();
    let cx = &books.cx;
    let mut seen = vec![false; cx.len()];
    for b in 0..cx.bin_count {
        let members = cx.bin(b);
        assert!(members.windows(2).all(|w| w[0] < w[1]));
        for &i in members {
            assert_eq!(cx.bins[i as usize], b);
            assert!(!seen[i as usize]);
            seen[i as usize] = true;
        }
    }
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn decodes_a_codeword_in_its_bin() {
    // X = Y uniform, W constant, U = X: the X-receiver can pick its codeword
    // out of a single bin from the side information alone.
    let src = sources::from_table([2, 2, 2, 1], vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
    let ch = AuxChannel::constant(xy_inputs(2, 2), Var::W);
    let codec = Codec::new(code_joint(&src, &ch).unwrap(), params(8, [0.0, 1.5, 1.5], [0.0, 0.0, 1.5], 5)).unwrap();
    let x = codec.books.cx.codeword(17).to_vec();
    let sent = codec.encode(&x, &x).unwrap();
    assert_eq!(codec.books.cx.codeword(sent.x_index as usize), &x[..]);
    assert_eq!(sent.m1, 0);
    let got = codec.decode_x(sent.m0, sent.m1, &x).unwrap();
    assert_eq!(got.seq, x);
    assert_eq!(got.w_index, Some(0));
    assert!(codec.decode_x(sent.m0, 1, &x).is_err());
    assert!(codec.encode(&x[..4], &x).is_err());
}

#[test]
fn full_side_information_gives_zero_error() {
    // U = X, V = Y: zero bin rates suffice once the codebooks cover the
    // typical sequences.
    let src = sources::from_table([2, 2, 2, 2], {
        let mut p = vec![0.0; 16];
        for (x, y, m) in [(0, 0, 0.375), (0, 1, 0.125), (1, 0, 0.125), (1, 1, 0.375)] {
            p[((x * 2 + y) * 2 + x) * 2 + y] = m;
        }
        p
    })
    .unwrap();
    let ch = AuxChannel::constant(xy_inputs(2, 2), Var::W);
    let sim = Simulator::new(&src, &ch, params(6, [0.0, 1.95, 1.95], [0.0; 3], 2)).unwrap();
    let out = sim.run(300);
    let mut covered_trials = 0;
    for t in 0..300 {
        let r = sim.trial(t);
        let covered = !r.flags.any(&[Event::E1, Event::E3x, Event::E3y]);
        if covered {
            covered_trials += 1;
            assert!(!r.err_x() && !r.err_y(), "trial {t}: {:?}", r.flags.iter().collect::<Vec<_>>());
        }
    }
    assert!(covered_trials > 0);
    assert!(out.pe() < 1.0);
}

#[test]
fn simulations_replay() {
    let src = sources::dsbs(0.25).unwrap();
    let ch = AuxChannel::deterministic(xy_inputs(2, 2), Alphabet::new(Var::W, 2), |i| i[0]).unwrap();
    let p = params(8, [1.2, 1.2, 1.2], [1.0, 0.2, 0.9], 4);
    let a = simulate(&src, &ch, &p, 200).unwrap();
    let b = simulate(&src, &ch, &p, 200).unwrap();
    assert_eq!(a, b);
    let sim = Simulator::new(&src, &ch, p).unwrap();
    assert_eq!(sim.trial(37), sim.trial(37));
    assert!(simulate(&src, &ch, &p, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_error_is_flagged(
        seed in 0u64..1000,
        n in 2usize..9,
        r0 in 0.0f64..2.0,
        r1 in 0.0f64..1.2,
        r2 in 0.0f64..1.2,
        q in 0.05f64..0.5,
        which in 0usize..4,
    ) {
        let src = match which {
            0 => sources::dsbs(q).unwrap(),
            1 => sources::compdel_dsbs(q).unwrap(),
            2 => sources::sgarro(q, q / 2.0).unwrap(),
            _ => sources::markov_dsbs(q).unwrap(),
        };
        let ch = AuxChannel::deterministic(xy_inputs(2, 2), Alphabet::new(Var::W, 4), |i| 2 * i[0] + i[1]).unwrap();
        let book = [r0.max(0.1), 1.2, 1.2];
        let p = params(n, book, [r0.min(book[0]), r1, r2], seed);
        let sim = Simulator::new(&src, &ch, p).unwrap();
        for t in 0..40 {
            let r = sim.trial(t);
            prop_assert!(!r.err_x() || r.flags.any(&Event::X_SIDE));
            prop_assert!(!r.err_y() || r.flags.any(&Event::Y_SIDE));
        }
    }
}
