use grand::channel::{observe, ChannelConfig};
use grand::code::LinearCode;
use grand::harness::{
    emit, from_json, point_seed, prepare, realize, run_bler, run_bler_logged, ExperimentConfig, MetricsRow,
    OutputFormat, WORKERS_ENV,
};

const CONFIG: &str = "\
code = bch:15,7
ebno_db = 2.0, 3.5
algorithm = sgrand
algorithm = psgrand:n=4
algorithm = orb:T=200
algorithm = hybrid:T=200,n=4
min_errors = 30
max_trials = 4000
seed = 21
";

fn without_wall_time(mut rows: Vec<MetricsRow>) -> Vec<MetricsRow> {
    for r in &mut rows {
        r.wall_ns_per_decode = 0.0;
    }
    rows
}

#[test]
fn paired_trials_share_realizations() {
    let config: ExperimentConfig = CONFIG.parse().unwrap();
    let code = LinearCode::build(&config.code).unwrap();
    let algs = prepare(&config, &code).unwrap();
    let cfg = ChannelConfig::new(3.0, code.rate(), point_seed(config.seed, 0));
    for trial in 0..500 {
        let (_, y) = realize(&code, &cfg, trial, false);
        let profile = observe(&y, &cfg);
        let outs: Vec<_> = algs.iter().map(|a| a.decode(&profile, &code).unwrap()).collect();
        // The tree searches and the hybrid are ML; ORB alone is not.
        for i in [1, 3] {
            assert!((outs[i].zeta - outs[0].zeta).abs() < 1e-9);
            assert_eq!(outs[i].codeword, outs[0].codeword);
        }
        assert!(outs[2].zeta >= outs[0].zeta - 1e-9);
        let hybrid = &outs[3];
        assert!(hybrid.queries >= hybrid.orb_queries.unwrap());
        assert!(hybrid.orb_queries.unwrap() <= outs[2].queries);
    }
}

#[test]
fn log_recount_matches_rows() {
    let config: ExperimentConfig = CONFIG.parse().unwrap();
    let (rows, log) = run_bler_logged(&config, true).unwrap();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let (point, alg) = (i / 4, i % 4);
        let ebno = config.ebno_db[point];
        let mine: Vec<_> = log.iter().filter(|r| r.algorithm == alg && r.ebno_db == ebno).collect();
        assert_eq!(mine.len() as u64, row.trials);
        assert_eq!(mine.iter().filter(|r| r.block_error).count() as u64, row.block_errors);
        let q: u64 = mine.iter().map(|r| r.queries).sum();
        assert!((q as f64 / row.trials as f64 - row.avg_queries).abs() < 1e-9);
    }
    // ML decoders err on the same trials.
    assert_eq!(rows[0].block_errors, rows[1].block_errors);
    assert_eq!(rows[0].block_errors, rows[3].block_errors);
    assert!(rows[2].block_errors >= rows[0].block_errors);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let config: ExperimentConfig = CONFIG.parse().unwrap();
    std::env::set_var(WORKERS_ENV, "1");
    let one = without_wall_time(run_bler(&config).unwrap());
    std::env::set_var(WORKERS_ENV, "3");
    let three = without_wall_time(run_bler(&config).unwrap());
    std::env::remove_var(WORKERS_ENV);
    assert_eq!(one, three);
}

#[test]
fn config_file_to_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.txt");
    std::fs::write(&cfg_path, CONFIG.replace("max_trials = 4000", "max_trials = 300")).unwrap();
    let config = ExperimentConfig::load(&cfg_path).unwrap();
    let rows = run_bler(&config).unwrap();

    let csv = dir.path().join("out.csv");
    emit(&rows, OutputFormat::for_path(&csv), &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), rows.len() + 1);

    let json = dir.path().join("out.json");
    emit(&rows, OutputFormat::for_path(&json), &json).unwrap();
    assert_eq!(from_json(&std::fs::read_to_string(&json).unwrap()).unwrap(), rows);

    let unwritable = dir.path().join("no/such/dir/out.csv");
    assert!(emit(&rows, OutputFormat::Csv, &unwritable).is_err());
}
