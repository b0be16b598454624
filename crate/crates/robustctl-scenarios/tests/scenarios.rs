use std::f64::consts::PI;

use robustctl_scenarios::emit::{csv_string, json_string, report_from_json, svg_string, table_csv};
use robustctl_scenarios::{emit, run_scenario, table_rows, Format, Overrides, ScenarioError, ScenarioId};

fn short(t_end: &str) -> Overrides {
    let mut o = Overrides::default();
    o.set(&format!("t_end={t_end}")).unwrap();
    o
}

#[test]
fn registry_literals() {
    assert_eq!(ScenarioId::ALL.len(), 14);
    for id in ScenarioId::ALL {
        assert_eq!(id.as_str().parse::<ScenarioId>().unwrap(), id);
        assert_eq!(id.defaults().dt, 0.001);
        assert!(!id.listing().is_empty());
    }
    let d = ScenarioId::DipSmc.defaults();
    assert_eq!((d.t_end, d.x0.clone(), d.slide_rate), (8.0, vec![0.2, 0.0, 0.0, 0.0, 20.0, 0.0], Some(8.0)));
    let d = ScenarioId::MotorcycleSmc.defaults();
    assert_eq!((d.t_end, d.preview), (10.0, Some(6.0)));
    assert_eq!(d.x0, vec![0.0, -0.2, -0.1, 0.0, 0.3, 0.0]);
    for id in [ScenarioId::SipRobustRiccati, ScenarioId::SipRobustRiccatiMidpoint, ScenarioId::SipIntervalPolynomial] {
        assert_eq!(id.defaults().t_end, 20.0);
        assert_eq!(id.defaults().x0, vec![0.4 * PI, 0.0, 0.2, 0.0]);
    }
    assert_eq!(ScenarioId::SipNonrobustFailure.defaults().t_end, 5.0);
    assert_eq!(ScenarioId::SipAdaptiveLookup.defaults().t_end, 10.0);
    assert_eq!(ScenarioId::SipAdaptiveSysid.defaults().t_end, 3.0);
    assert_eq!(ScenarioId::SipCbf.defaults().x0, vec![0.2, 0.0, 20.0, 0.0]);
    assert_eq!(ScenarioId::Point2dCbfCase1.defaults().x0, vec![4.0, 5.0]);
    assert_eq!(ScenarioId::Point2dCbfCase1.unsafe_disk(), Some((2.0, 2.0, 1.0)));
    assert_eq!(ScenarioId::Point2dClfCbfCase2.unsafe_disk(), Some((0.0, 3.5, 3.0)));
    assert!(matches!("nope".parse::<ScenarioId>(), Err(ScenarioError::UnknownScenario(_))));
}

#[test]
fn overrides_are_validated() {
    let mut o = Overrides::default();
    for bad in ["dt", "dt=abc", "x0[x]=1", "frobnicate=2"] {
        assert!(o.set(bad).is_err(), "{bad} accepted");
    }
    let reject = |pair: &str, id: ScenarioId| {
        let mut o = Overrides::default();
        o.set(pair).unwrap();
        o.apply(id).is_err()
    };
    assert!(reject("dt=0", ScenarioId::SipCbf));
    assert!(reject("dt=-1", ScenarioId::SipCbf));
    assert!(reject("t_end=0.0001", ScenarioId::SipCbf));
    assert!(reject("x0=1,2,3", ScenarioId::SipCbf));
    assert!(reject("x0[4]=1", ScenarioId::SipCbf));
    assert!(reject("x0[0]=inf", ScenarioId::SipCbf));
    assert!(reject("slide_rate=1", ScenarioId::SipCbf));
    assert!(reject("preview=1", ScenarioId::DipSmc));
    assert!(reject("slide_rate=0", ScenarioId::DipSmc));

    let mut o = Overrides::default();
    o.set("x0=1,2").unwrap();
    o.set("x0[1]=7").unwrap();
    o.set("dt=0.01").unwrap();
    let d = o.apply(ScenarioId::Point2dCbfCase1).unwrap();
    assert_eq!((d.x0, d.dt), (vec![1.0, 7.0], 0.01));
}

#[test]
fn csv_has_one_row_per_sample() {
    let (traj, _) = run_scenario(ScenarioId::Point2dCbfCase1, &short("0.5")).unwrap();
    let csv = csv_string(&traj, 2, 1);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x1,x2,u1");
    assert_eq!(lines.len(), traj.times.len() + 1);
    // The initial sample plus one per Euler step.
    assert_eq!(traj.times.len(), traj.steps_taken + 1);
    assert_eq!(traj.steps_taken, 501);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
    assert!(!csv.contains('\r'));
}

#[test]
fn empty_trajectory_csv_is_header_only() {
    let (mut traj, _) = run_scenario(ScenarioId::SipNonrobustFailure, &short("0.01")).unwrap();
    traj.times.clear();
    traj.states.clear();
    traj.inputs.clear();
    assert_eq!(csv_string(&traj, 4, 1), "t,x1,x2,x3,x4,u1\n");
}

#[test]
fn json_round_trips_the_report() {
    let (traj, report) = run_scenario(ScenarioId::Point2dClfCbfCase1, &short("1")).unwrap();
    let text = json_string(&traj, &report).unwrap();
    assert_eq!(report_from_json(&text).unwrap(), report);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["report"]["scenario"], "point2d_clf_cbf_case1");
    assert_eq!(v["trajectory"]["samples"], traj.times.len());
}

#[test]
fn runs_are_deterministic() {
    for id in [ScenarioId::SipAdaptiveSysid, ScenarioId::MotorcycleSmc, ScenarioId::Point2dCbfCase2] {
        let (_, a) = run_scenario(id, &short("1")).unwrap();
        let (_, b) = run_scenario(id, &short("1")).unwrap();
        assert_eq!(a.checksum, b.checksum);
        assert_eq!(a.checksum.len(), 64);
    }
    let (_, a) = run_scenario(ScenarioId::SipCbf, &short("1")).unwrap();
    let (_, b) = run_scenario(ScenarioId::SipCbf, &short("2")).unwrap();
    assert_ne!(a.checksum, b.checksum);
}

#[test]
fn every_scenario_emits_every_format() {
    let dir = tempfile::tempdir().unwrap();
    for id in ScenarioId::ALL {
        let (traj, report) = run_scenario(id, &short("0.2")).unwrap();
        assert_eq!(report.scenario, id);
        for format in [Format::Csv, Format::Json, Format::Svg] {
            let path = dir.path().join(format!("{id}.{}", format.extension()));
            emit(&traj, &report, format, &path).unwrap();
            assert!(std::fs::metadata(&path).unwrap().len() > 0);
        }
        let svg = svg_string(&traj, &report);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn tables_cover_the_sweep() {
    for which in [1, 2] {
        let rows = table_rows(which).unwrap();
        let csv = table_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta_deg,re1,re2,re3");
        assert_eq!(lines.len(), 146);
        assert!(lines[1].starts_with("-72,") && lines[145].starts_with("72,"));
        // The sweep is symmetric in the angle.
        for (a, b) in rows.iter().zip(rows.iter().rev()) {
            for (x, y) in a.re.iter().zip(&b.re) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
    assert!(table_rows(3).is_err());
}
