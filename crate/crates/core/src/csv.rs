//! Plain CSV tables: comma separated, header row, 17 significant digits.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::drive::PreparedDrive;
use crate::integrate::{OdeState, Trajectory};
use crate::state::BlochState;

pub const SCHRODINGER_HEADER: [&str; 7] = ["t", "re_c1", "im_c1", "re_c2", "im_c2", "n1", "n2"];
pub const BLOCH_HEADER: [&str; 8] = [
    "t",
    "delta",
    "re_sigma",
    "im_sigma",
    "n1",
    "n2",
    "envelope",
    "inst_freq",
];

/// Round-trippable scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    body: String,
    rows: usize,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_owned()).collect(),
            body: String::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            let _ = write!(self.body, "{v:.16e}");
        }
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        out.push_str(&self.body);
        out
    }
}

/// Generic export: time, then the state's real components.
pub fn trajectory_table<S: OdeState, H: AsRef<str>>(traj: &Trajectory<S>, header: &[H]) -> Table {
    let mut t = Table::new(header);
    for (time, s) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![*time];
        row.extend(s.reals());
        t.push(&row);
    }
    t
}

pub fn amplitude_row(t: f64, a: [C64; 2]) -> [f64; 7] {
    [t, a[0].re, a[0].im, a[1].re, a[1].im, a[0].norm_sqr(), a[1].norm_sqr()]
}

pub fn schrodinger_table(traj: &Trajectory<[C64; 2]>) -> Table {
    let mut t = Table::new(&SCHRODINGER_HEADER);
    for (time, s) in traj.times.iter().zip(&traj.states) {
        t.push(&amplitude_row(*time, *s));
    }
    t
}

pub fn bloch_row(t: f64, s: &BlochState, drive: &PreparedDrive) -> [f64; 8] {
    [
        t,
        s.delta_pop,
        s.sigma.re,
        s.sigma.im,
        s.n1(),
        s.n2(),
        drive.envelope(t),
        drive.frequency(t),
    ]
}

pub fn bloch_table(times: &[f64], states: &[BlochState], drive: &PreparedDrive) -> Table {
    let mut t = Table::new(&BLOCH_HEADER);
    for (time, s) in times.iter().zip(states) {
        t.push(&bloch_row(*time, s, drive));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};

    #[test]
    fn values_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = format_value(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(&[1.0, 2.5]);
        let s = t.render();
        assert_eq!(s, "a,b\n1.0000000000000000e0,2.5000000000000000e0\n");
    }

    #[test]
    fn schrodinger_export_columns() {
        let tr = integrate(
            |_, y: &[C64; 2]| [C64::new(0.0, -1.0) * y[0], C64::new(0.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            (0.0, 1.0),
            &IntegratorConfig::fixed(0.5),
        )
        .unwrap();
        let s = schrodinger_table(&tr).render();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "t,re_c1,im_c1,re_c2,im_c2,n1,n2");
        assert_eq!(lines.count(), 3);
        let generic = trajectory_table(&tr, &SCHRODINGER_HEADER[..5]).render();
        assert_eq!(generic.lines().nth(1).unwrap().split(',').count(), 5);
    }
}
