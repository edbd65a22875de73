use proptest::prelude::*;
use rand::Rng;

use super::*;

fn small(seed: u64) -> DennConfig {
    DennConfig {
        dim: 8,
        pos_vocab: default_pos_vocab(),
        pos_dim: 4,
        hidden1: 10,
        hidden2: 7,
        leaky_slope: 0.01,
        dropout_p: 0.0,
        seed,
    }
}

fn random_example(rng: &mut ChaCha8Rng, dim: usize, tags: usize) -> TrainExample {
    let mut v = || (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect::<Vec<_>>();
    let (vec_h, vec_m, target) = (v(), v(), v());
    TrainExample {
        vec_h,
        vec_m,
        pos_h: rng.gen_range(0..tags),
        pos_m: rng.gen_range(0..tags),
        pos_c: rng.gen_range(0..tags),
        target,
    }
}

fn eval_loss(model: &DennModel, ex: &TrainExample) -> f64 {
    let out = model.forward_cached(&ex.input(), None).unwrap().output;
    loss_with_gradient(&out, &ex.target).unwrap().0.value
}

#[test]
fn gradients_match_central_differences() {
    for seed in [1, 2, 3] {
        let mut model = DennModel::new(small(seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let ex = random_example(&mut rng, 8, model.config.pos_vocab.len());
        let (_, grads) = model.loss_and_gradients(&ex, None).unwrap();
        let mut checked = 0;
        for (t, name) in TENSOR_NAMES.iter().enumerate() {
            for i in 0..grads.0[t].len() {
                let analytic = grads.0[t][i];
                let x = model.tensors()[t][i];
                let plus = x + 1e-4;
                let minus = x - 1e-4;
                model.tensors_mut()[t][i] = plus;
                let lp = eval_loss(&model, &ex);
                model.tensors_mut()[t][i] = minus;
                let lm = eval_loss(&model, &ex);
                model.tensors_mut()[t][i] = x;
                let fd = (lp - lm) / (f64::from(plus) - f64::from(minus));
                let err = (analytic - fd).abs() / fd.abs().max(1.0);
                assert!(
                    err < 1e-4,
                    "seed {seed} {name}[{i}]: analytic {analytic} numeric {fd}"
                );
                checked += 1;
            }
        }
        assert_eq!(checked, model.parameter_count());
    }
}

#[test]
fn only_used_pos_rows_get_gradient() {
    let model = DennModel::new(small(4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ex = random_example(&mut rng, 8, 3);
    (ex.pos_h, ex.pos_m, ex.pos_c) = (0, 2, 2);
    let (_, grads) = model.loss_and_gradients(&ex, None).unwrap();
    let p = model.config.pos_dim;
    for (row, g) in grads.0[4].chunks(p).enumerate() {
        let touched = g.iter().any(|&x| x != 0.0);
        assert_eq!(touched, row == 0 || row == 2, "row {row}");
    }
}

#[test]
fn initialisation_ranges() {
    let model = DennModel::new(DennConfig::default()).unwrap();
    let limit = (6.0f64 / 300.0).sqrt() as f32;
    assert!(model.w_h.w.iter().all(|w| w.abs() <= limit));
    assert!(model.w_h.b.iter().all(|&b| b == 0.0));
    assert!(model.eps.iter().all(|e| e.abs() <= 0.05));
    let l1 = (6.0f64 / 348.0).sqrt() as f32;
    assert!(model.w1.w.iter().all(|w| w.abs() <= l1));
    let max = model.w1.w.iter().fold(0.0f32, |m, w| m.max(w.abs()));
    assert!(max > 0.9 * l1);
    assert_eq!(model.w1.n_in, 348);
    assert_eq!(model.w3.n_out, 300);
}

#[test]
fn same_seed_same_model() {
    assert_eq!(
        DennModel::new(small(7)).unwrap(),
        DennModel::new(small(7)).unwrap()
    );
    assert_ne!(
        DennModel::new(small(7)).unwrap(),
        DennModel::new(small(8)).unwrap()
    );
}

#[test]
fn config_validation() {
    let mut c = small(0);
    c.dropout_p = 1.0;
    assert!(DennModel::new(c).is_err());
    let mut c = small(0);
    c.pos_vocab.push("NN".into());
    assert!(DennModel::new(c).is_err());
    let mut c = small(0);
    c.hidden2 = 0;
    assert!(DennModel::new(c).is_err());
}

#[test]
fn shape_and_tag_errors() {
    let model = DennModel::new(small(0)).unwrap();
    let v = vec![0.5f32; 7];
    let w = vec![0.5f32; 8];
    let bad = Example {
        vec_h: &v,
        vec_m: &w,
        pos: [0, 0, 0],
    };
    assert!(matches!(model.forward(&bad, None), Err(DennError::Shape { .. })));
    let bad = Example {
        vec_h: &w,
        vec_m: &w,
        pos: [0, 99, 0],
    };
    assert!(matches!(
        model.forward(&bad, None),
        Err(DennError::PosIndex { .. })
    ));
    assert_eq!(model.config.pos_index("NONE").unwrap(), 0);
    assert_eq!(
        model.config.pos_index("ZZZ").unwrap(),
        model.config.pos_index("X").unwrap()
    );
}

#[test]
fn identity_construction_reproduces_head() {
    let mut c = small(0);
    c.hidden1 = 8;
    c.hidden2 = 8;
    let mut m = DennModel::zeros(c).unwrap();
    let width = m.config.input_width();
    for i in 0..8 {
        m.w_h.w[i * 8 + i] = 1.0;
        m.w1.w[i * width + i] = 1.0;
        m.w2.w[i * 8 + i] = 1.0;
        m.w3.w[i * 8 + i] = 1.0;
    }
    let vh: Vec<f32> = (1..=8).map(|i| i as f32 / 8.0).collect();
    let vm = vec![-3.0f32; 8];
    let out = m
        .forward(
            &Example {
                vec_h: &vh,
                vec_m: &vm,
                pos: [2, 3, 4],
            },
            None,
        )
        .unwrap();
    assert_eq!(out, vh);
    assert!(loss(&out, &vh).unwrap().value.abs() < 1e-15);
}

#[test]
fn leaky_slope_on_negative_inputs() {
    let mut c = small(0);
    c.hidden1 = 8;
    c.hidden2 = 8;
    let mut m = DennModel::zeros(c).unwrap();
    let width = m.config.input_width();
    for i in 0..8 {
        m.w_h.w[i * 8 + i] = 1.0;
        m.w1.w[i * width + i] = 1.0;
        m.w2.w[i * 8 + i] = 1.0;
        m.w3.w[i * 8 + i] = 1.0;
    }
    let vh = vec![-1.0f32; 8];
    let out = m
        .forward(
            &Example {
                vec_h: &vh,
                vec_m: &vh,
                pos: [0, 0, 0],
            },
            None,
        )
        .unwrap();
    // three LeakyReLU layers: s, a1, a2
    for o in out {
        assert!((f64::from(o) + 1e-6).abs() < 1e-12);
    }
}

#[test]
fn zero_output_gets_penalty_and_no_gradient() {
    let m = DennModel::zeros(small(0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let ex = random_example(&mut rng, 8, 5);
    let (l, g) = m.loss_and_gradients(&ex, None).unwrap();
    assert!(l.zero_norm_output);
    assert_eq!(l.value, ZERO_NORM_PENALTY);
    assert!(g.0.iter().all(|t| t.iter().all(|&x| x == 0.0)));
    let mut m = m;
    let report = train(
        &mut m,
        &[ex],
        &TrainOptions {
            epochs: 2,
            ..TrainOptions::default()
        },
    )
    .unwrap();
    assert_eq!(report.zero_norm_outputs, 2);
}

#[test]
fn zero_target_is_an_error() {
    assert_eq!(loss(&[1.0, 2.0], &[0.0, 0.0]), Err(DennError::ZeroTarget));
    assert!(matches!(loss(&[1.0], &[1.0, 0.0]), Err(DennError::Shape { .. })));
}

#[test]
fn loss_values() {
    assert!(loss(&[1.0, 0.0], &[2.0, 0.0]).unwrap().value.abs() < 1e-15);
    assert!((loss(&[1.0, 0.0], &[0.0, 3.0]).unwrap().value - 1.0).abs() < 1e-15);
    assert!((loss(&[1.0, 0.0], &[-1.0, 0.0]).unwrap().value - 2.0).abs() < 1e-15);
}

#[test]
fn dropout_masks_are_inverted() {
    let mut c = small(0);
    c.dropout_p = 0.5;
    let m = DennModel::new(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ex = random_example(&mut rng, 8, 5);
    let cache = m.forward_cached(&ex.input(), Some(&mut rng)).unwrap();
    for mask in [&cache.mask_s, &cache.mask1, &cache.mask2] {
        assert!(mask.iter().all(|&k| k == 0.0 || k == 2.0));
    }
    assert!(cache.mask1.contains(&0.0));
    let a = m.forward(&ex.input(), None).unwrap();
    let b = m.forward(&ex.input(), None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_learning_rate_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<_> = (0..20).map(|_| random_example(&mut rng, 8, 6)).collect();
    for optimizer in [Optimizer::Sgd, Optimizer::Adam] {
        let mut c = small(3);
        c.dropout_p = 0.1;
        let mut m = DennModel::new(c).unwrap();
        let before = m.clone();
        let opts = TrainOptions {
            optimizer,
            lr: 0.0,
            batch_size: 7,
            epochs: 2,
            seed: 1,
        };
        train(&mut m, &data, &opts).unwrap();
        assert_eq!(m, before, "{optimizer}");
    }
}

#[test]
fn zero_epochs_is_a_no_op() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<_> = (0..5).map(|_| random_example(&mut rng, 8, 6)).collect();
    let mut m = DennModel::new(small(3)).unwrap();
    let before = m.clone();
    let opts = TrainOptions {
        epochs: 0,
        ..TrainOptions::default()
    };
    let report = train(&mut m, &data, &opts).unwrap();
    assert!(report.epoch_losses.is_empty());
    assert_eq!(m, before);
}

#[test]
fn training_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<_> = (0..30).map(|_| random_example(&mut rng, 8, 6)).collect();
    let run = |seed| {
        let mut c = small(3);
        c.dropout_p = 0.1;
        let mut m = DennModel::new(c).unwrap();
        let opts = TrainOptions {
            batch_size: 8,
            epochs: 3,
            seed,
            ..TrainOptions::default()
        };
        let r = train(&mut m, &data, &opts).unwrap();
        (m, r)
    };
    assert_eq!(run(4), run(4));
    assert_ne!(run(4).0, run(5).0);
}

#[test]
fn learns_to_copy_the_head_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dim = 16;
    let data: Vec<_> = (0..200)
        .map(|_| {
            let mut ex = random_example(&mut rng, dim, 10);
            ex.target = ex.vec_h.clone();
            ex
        })
        .collect();
    let config = DennConfig {
        dim,
        hidden1: 64,
        hidden2: 64,
        pos_dim: 4,
        dropout_p: 0.0,
        seed: 1,
        ..DennConfig::default()
    };
    let mut m = DennModel::new(config).unwrap();
    let opts = TrainOptions {
        lr: 1e-2,
        batch_size: 16,
        seed: 2,
        ..TrainOptions::default()
    };
    let report = train(&mut m, &data, &opts).unwrap();
    let l = &report.epoch_losses[..5];
    assert!(l.windows(2).all(|w| w[1] < w[0]), "{l:?}");
    let final_loss = mean_loss(&m, &data).unwrap();
    assert!(final_loss < 0.05, "{final_loss}");
}

#[test]
fn divergence_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<_> = (0..10).map(|_| random_example(&mut rng, 8, 6)).collect();
    let mut m = DennModel::new(small(1)).unwrap();
    m.w3.w[0] = f32::NAN;
    let err = train(&mut m, &data, &TrainOptions::default()).unwrap_err();
    assert!(matches!(err, TrainError::NonFinite { .. }), "{err:?}");
}

#[test]
fn bad_options_are_rejected() {
    let mut m = DennModel::new(small(1)).unwrap();
    assert_eq!(
        train(&mut m, &[], &TrainOptions::default()),
        Err(TrainError::Empty)
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = vec![random_example(&mut rng, 8, 6)];
    let opts = TrainOptions {
        batch_size: 0,
        ..TrainOptions::default()
    };
    assert!(matches!(train(&mut m, &data, &opts), Err(TrainError::Options(_))));
}

fn checkpoint_bytes(m: &DennModel) -> Vec<u8> {
    let mut buf = Vec::new();
    write_model(m, &mut buf).unwrap();
    buf
}

#[test]
fn checkpoint_round_trip() {
    let m = DennModel::new(small(9)).unwrap();
    let buf = checkpoint_bytes(&m);
    assert_eq!(read_model(&mut buf.as_slice()).unwrap(), m);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    save_model(&m, &path).unwrap();
    assert_eq!(load_model(&path).unwrap(), m);
}

#[test]
fn checkpoint_corruption() {
    let m = DennModel::new(small(9)).unwrap();
    let buf = checkpoint_bytes(&m);
    let cut = &buf[..buf.len() - 3];
    assert!(matches!(
        read_model(&mut &cut[..]),
        Err(CheckpointError::Truncated("b_3"))
    ));
    let mut long = buf.clone();
    long.extend_from_slice(&[0, 0]);
    assert!(matches!(
        read_model(&mut long.as_slice()),
        Err(CheckpointError::Trailing(2))
    ));
    let mut v2 = buf.clone();
    v2[8] = 2;
    assert!(matches!(
        read_model(&mut v2.as_slice()),
        Err(CheckpointError::Version { found: 2 })
    ));
    let mut magic = buf;
    magic[0] = b'X';
    assert!(matches!(
        read_model(&mut magic.as_slice()),
        Err(CheckpointError::Magic)
    ));
}

fn table() -> EmbeddingTable {
    let mut t = EmbeddingTable::new("t", 8).unwrap();
    t.insert("feeling", &[1.0, 0.5, 0.0, 0.0, 0.2, 0.0, 0.1, 0.0])
        .unwrap();
    t.insert("sadness", &[0.0, 1.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.4])
        .unwrap();
    t
}

#[test]
fn predict_oov_inputs() {
    let m = DennModel::new(small(2)).unwrap();
    let t = table();
    let pair = DefPair::new("Feeling", "NN", Some(("sadness", "NN")));
    let (vh, vm, pos) = pair_input(&m.config, &t, &pair, "NN").unwrap();
    assert_eq!(vh, t.lookup("feeling").unwrap());
    assert_eq!(vm, t.lookup("sadness").unwrap());
    assert_eq!(pos, [2, 2, 2]);
    let out = predict_oov(&m, &t, &pair, "NN").unwrap();
    assert_eq!(out.len(), 8);

    let lone = DefPair::new("feeling", "NN", None);
    let oov_m = DefPair::new("feeling", "NN", Some(("dreary", "JJ")));
    let (_, vm, pos) = pair_input(&m.config, &t, &lone, "VB").unwrap();
    assert!(vm.iter().all(|&x| x == 0.0));
    assert_eq!(pos, [2, 0, 6]);
    assert_eq!(
        predict_oov(&m, &t, &lone, "VB").unwrap(),
        predict_oov(&m, &t, &oov_m, "VB").unwrap()
    );

    let missing = DefPair::new("gloom", "NN", None);
    assert_eq!(
        predict_oov(&m, &t, &missing, "NN"),
        Err(DennError::UnusablePair("gloom".into()))
    );
    let wide = EmbeddingTable::new("w", 9).unwrap();
    assert!(matches!(
        predict_oov(&m, &wide, &pair, "NN"),
        Err(DennError::Shape { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loss_is_scale_invariant(
        o in prop::collection::vec(-5.0f64..5.0, 6),
        t in prop::collection::vec(-5.0f64..5.0, 6),
        a in 0.01f64..100.0,
        b in 0.01f64..100.0,
    ) {
        prop_assume!(embed_store::norm(&o) > 1e-3 && embed_store::norm(&t) > 1e-3);
        let base = loss(&o, &t).unwrap().value;
        let os: Vec<f64> = o.iter().map(|x| x * a).collect();
        let ts: Vec<f64> = t.iter().map(|x| x * b).collect();
        let scaled = loss(&os, &ts).unwrap().value;
        prop_assert!((base - scaled).abs() < 1e-12);
        prop_assert!((0.0..=2.0).contains(&base));
    }

    #[test]
    fn loss_gradient_is_orthogonal_to_output(
        o in prop::collection::vec(-5.0f64..5.0, 6),
        t in prop::collection::vec(-5.0f64..5.0, 6),
    ) {
        prop_assume!(embed_store::norm(&o) > 1e-3 && embed_store::norm(&t) > 1e-3);
        let (_, g) = loss_with_gradient(&o, &t).unwrap();
        let scale = embed_store::norm(&g) * embed_store::norm(&o);
        prop_assert!(embed_store::dot(&g, &o).abs() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn checkpoints_round_trip_any_seed(seed in any::<u64>()) {
        let m = DennModel::new(small(seed)).unwrap();
        let buf = checkpoint_bytes(&m);
        prop_assert_eq!(read_model(&mut buf.as_slice()).unwrap(), m);
    }
}
