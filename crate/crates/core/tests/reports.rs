use pdlab::config::{run_experiment, RunConfig};
use pdlab::experiments::{ExperimentParams, ExperimentReport, OutputPaths};

fn continuity_config() -> RunConfig {
    let mut c = RunConfig::from_json(
        r#"{"experiment":{"kind":"continuity","log2_points":[6,7,8],"trials":4,
            "cases":[{"source":"B:s=0,p=2,q=2","target":"H:s=0"}]},"seed":7}"#,
    )
    .unwrap();
    c.outputs = OutputPaths::default();
    c
}

fn run_on(threads: usize, c: &RunConfig) -> String {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run_experiment(c).unwrap().to_json().unwrap())
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let c = continuity_config();
    let one = run_on(1, &c);
    assert_eq!(one, run_on(3, &c));
    assert_eq!(one, run_on(8, &c));
}

#[test]
fn embedded_config_replays_bit_identically() {
    let rep = run_experiment(&continuity_config()).unwrap();
    let embedded: RunConfig = serde_json::from_value(rep.config.clone().unwrap()).unwrap();
    let again = run_experiment(&embedded).unwrap();
    assert_eq!(rep.to_json().unwrap(), again.to_json().unwrap());
    let parsed = ExperimentReport::from_json(&rep.to_json().unwrap()).unwrap();
    assert_eq!(parsed, rep);
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = RunConfig::default();
    c.experiment = ExperimentParams::default_for("wavefront");
    let rep = run_experiment(&c).unwrap();
    let out = OutputPaths {
        report: Some(dir.path().join("r/report.json")),
        csv: Some(dir.path().join("r/report.csv")),
        dat: Some(dir.path().join("r/report.dat")),
        svg: Some(dir.path().join("r/report.svg")),
    };
    rep.write_outputs(&out).unwrap();
    let csv = std::fs::read_to_string(out.csv.unwrap()).unwrap();
    assert!(csv.starts_with("index,quantity,value,formula\n"));
    assert_eq!(csv.lines().count(), rep.rows.len() + 1);
    let svg = std::fs::read_to_string(out.svg.unwrap()).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(std::fs::read_to_string(out.dat.unwrap()).unwrap().contains('#'));
    let json = std::fs::read_to_string(out.report.unwrap()).unwrap();
    assert!(ExperimentReport::from_json(&json).unwrap().passed());
}

#[test]
fn missing_experiment_is_an_error() {
    assert!(run_experiment(&RunConfig::default()).is_err());
}
