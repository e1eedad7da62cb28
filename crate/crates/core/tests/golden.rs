use qsat::bench::{run_bench, write_q_gi_csv, BenchOptions};
use qsat::corpus::builtin;

#[test]
fn qubit_and_iteration_table() {
    let opts = BenchOptions {
        simulate: false,
        ..BenchOptions::default()
    };
    let rows = run_bench(&builtin(), &opts).unwrap();
    let mut buf = Vec::new();
    write_q_gi_csv(&rows, &mut buf).unwrap();
    let got = String::from_utf8(buf).unwrap();
    let want = include_str!("golden/q_gi.csv");
    assert_eq!(got.replace("\r\n", "\n"), want);
    assert!(rows.iter().all(|r| r.p_sat.is_none()));
}

#[test]
fn structured_rows_report_improvement() {
    let opts = BenchOptions {
        simulate: false,
        ..BenchOptions::default()
    };
    let rows = run_bench(&builtin(), &opts).unwrap();
    for pair in rows.chunks(2) {
        let (flat, st) = (&pair[0], &pair[1]);
        assert_eq!(flat.name, st.name);
        assert!(flat.improv_cx.is_none());
        assert!(st.improv_cx.unwrap() > 0.0 && st.improv_u.unwrap() > 0.0 && st.improv_d.unwrap() > 0.0);
        assert_eq!(flat.cex, st.cex);
    }
}
