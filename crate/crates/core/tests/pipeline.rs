use noisebench::harness::{case_seed, read_report_json, run_case};
use noisebench::transforms::{stft, StftConfig};
use noisebench::{
    builtin_suite, evaluate, read_dataset, simulate_dataset, write_dataset, MinMaxScaler, MultitaperConfig, NoiseSpec,
    PulseShape, QuantileMap,
};

#[test]
fn dataset_survives_disk_and_scores_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = NoiseSpec::shot(1.0, PulseShape::LinearExponential).unwrap();
    let ds = simulate_dataset(&spec, 24, 1024, 17).unwrap();
    let path = tmp.path().join("shot.nbts");
    write_dataset(&ds, &path).unwrap();
    let back = read_dataset(&path).unwrap();
    assert_eq!(back, ds);
    let cfg = MultitaperConfig::default();
    let other = simulate_dataset(&spec, 24, 1024, 18).unwrap();
    let a = evaluate(&ds, &other, &spec, &cfg).unwrap();
    let b = evaluate(&back, &other, &spec, &cfg).unwrap();
    assert_eq!(a.geodesic_distance.to_bits(), b.geodesic_distance.to_bits());
    assert!(a.geodesic_distance > 0.0);
}

/// The preprocessing chain a time-frequency generator would train on: STFT,
/// then a per-channel quantile map. Every cell comes back as itself clipped
/// to the fitted quantile range, and only the extreme tails are clipped.
#[test]
fn stft_quantile_chain_round_trips_up_to_clipping() {
    let spec = NoiseSpec::fgn(0.7).unwrap();
    let ds = simulate_dataset(&spec, 16, 4096, 3).unwrap();
    let cfg = StftConfig::new(128, 0.5);
    let spectra: Vec<_> = ds.iter_series().map(|x| stft(x, &cfg).unwrap()).collect();
    let map = QuantileMap::fit_stft(&spectra, 1024).unwrap();
    assert_eq!(map.n_channels(), 2);
    let (mut clipped, mut cells) = (0usize, 0usize);
    for s in &spectra {
        let z = map.apply_stft(s).unwrap();
        assert_eq!(z.shape(), (2, 65, 65));
        let back = map.invert_stft(&z).unwrap();
        for c in 0..2 {
            let q = &map.quantiles[c];
            let (lo, hi) = (q[0], q[q.len() - 1]);
            for (&v, &b) in s.channel(c).iter().zip(back.channel(c)) {
                let expected = v.clamp(lo, hi);
                assert!((b - expected).abs() <= 1e-9 * expected.abs().max(1.0), "{v} -> {b}");
                clipped += usize::from(expected != v);
                cells += 1;
            }
        }
    }
    // Probability points (j + 1/2)/1024 leave 1/2048 of the mass in each tail.
    let fraction = clipped as f64 / cells as f64;
    assert!(fraction > 0.0 && fraction < 2.0 / 1024.0, "clipped fraction {fraction}");
}

#[test]
fn minmax_maps_training_data_onto_symmetric_unit_range() {
    let ds = simulate_dataset(&NoiseSpec::sas(1.2).unwrap(), 8, 512, 4).unwrap();
    let scaler = MinMaxScaler::fit_dataset(&ds).unwrap();
    let scaled = scaler.apply_dataset(&ds).unwrap();
    let (lo, hi) = scaled.as_slice().iter().fold((f64::MAX, f64::MIN), |(l, h), v| (l.min(*v), h.max(*v)));
    assert_eq!((lo, hi), (-1.0, 1.0));
    let back = scaler.invert_dataset(&scaled).unwrap();
    let err = back.as_slice().iter().zip(ds.as_slice()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / b.abs().max(1.0)));
    assert!(err < 1e-12);
}

#[test]
fn suite_case_report_matches_files_on_disk() {
    let tmp = tempfile::tempdir().unwrap();
    let case = builtin_suite().into_iter().find(|c| c.case_id == "fgn_h0.30").unwrap();
    let cfg = MultitaperConfig::default();
    let seed = case_seed(9, 0);
    let report = run_case(&case, seed, 0.004, &cfg, tmp.path()).unwrap();
    let test = read_dataset(tmp.path().join("target_test.nbts")).unwrap();
    assert_eq!(test.n_series(), report.n_target);
    let on_disk = read_report_json(tmp.path().join("report.json")).unwrap();
    assert_eq!(on_disk.geodesic_distance.to_bits(), report.geodesic_distance.to_bits());
    assert_eq!(on_disk.true_params["H"], 0.3);
    // Rerunning the case reproduces the report byte for byte.
    let again = tempfile::tempdir().unwrap();
    run_case(&case, seed, 0.004, &cfg, again.path()).unwrap();
    for f in ["report.json", "target_train.nbts", "target_test.nbts", "psd.csv", "params.csv"] {
        assert_eq!(std::fs::read(tmp.path().join(f)).unwrap(), std::fs::read(again.path().join(f)).unwrap(), "{f}");
    }
}
