//! `trace.csv` and `summary.csv` rows. Reals use 17 significant digits.

use std::fmt::Write as _;

use super::measure::FrequencyTrace;

pub const TRACE_HEADER: &str = "run_id,seed,iteration,metric_name,frequency_or_degree,value";
pub const SUMMARY_HEADER: &str = "run_id,seed,frequency_or_degree,threshold,time_to_threshold,final_value";

/// Raw rows for every label and checkpoint, then smoothed rows
/// (`<metric>_smoothed`) when the trace window exceeds one.
pub fn append_trace(out: &mut String, run_id: &str, seed: u64, trace: &FrequencyTrace) {
    let name = trace.metric().name();
    let mut emit = |metric: &str, series: &[f64], label: usize| {
        for (it, v) in trace.checkpoints().iter().zip(series) {
            writeln!(out, "{run_id},{seed},{it},{metric},{label},{v:.16e}").expect("write to string");
        }
    };
    for (i, &label) in trace.labels().iter().enumerate() {
        emit(name, trace.series(i), label);
    }
    if trace.window() > 1 {
        let smoothed = format!("{name}_smoothed");
        for (i, &label) in trace.labels().iter().enumerate() {
            emit(&smoothed, &trace.smoothed(i), label);
        }
    }
}

/// Loss rows, with an empty `frequency_or_degree` field.
pub fn append_loss(out: &mut String, run_id: &str, seed: u64, iterations: &[usize], loss: &[f64]) {
    for (it, l) in iterations.iter().zip(loss) {
        writeln!(out, "{run_id},{seed},{it},loss,,{l:.16e}").expect("write to string");
    }
}

/// One row per label: time to `threshold` (empty if never reached) and the
/// final raw value.
pub fn append_summary(out: &mut String, run_id: &str, seed: u64, trace: &FrequencyTrace, threshold: f64) {
    let finals = trace.final_values();
    for (i, &label) in trace.labels().iter().enumerate() {
        let t = trace
            .time_to_threshold(i, threshold)
            .map(|t| t.to_string())
            .unwrap_or_default();
        writeln!(out, "{run_id},{seed},{label},{threshold:.16e},{t},{:.16e}", finals[i]).expect("write to string");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Metric;

    #[test]
    fn rows() {
        let mut t = FrequencyTrace::new(Metric::ResidualProjection, vec![4], 2);
        t.push(0, &[1.0]).unwrap();
        t.push(10, &[0.25]).unwrap();
        let mut s = String::new();
        append_trace(&mut s, "pi", 3, &t);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "pi,3,10,residual_projection,4,2.5000000000000000e-1");
        assert_eq!(lines[3], "pi,3,10,residual_projection_smoothed,4,6.2500000000000000e-1");
        let mut s = String::new();
        append_summary(&mut s, "pi", 3, &t, 0.5);
        assert_eq!(s, "pi,3,4,5.0000000000000000e-1,10,2.5000000000000000e-1\n");
        let mut s = String::new();
        append_loss(&mut s, "pi", 3, &[0], &[2.0]);
        assert_eq!(s, "pi,3,0,loss,,2.0000000000000000e0\n");
    }
}
