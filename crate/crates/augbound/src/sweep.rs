//! The Gaussian sweep as CSV and SVG.

use augbound_core::gaussian::{figure1_sweep, SweepPanel, SweepRow};

use crate::config::GaussianSweepConfig;
use crate::error::AppResult;
use crate::plot::{render, Panel, Series};

pub const CSV_HEADER: &str = "t2,n,m,kl_nats,orbit_mi_nats,aug_mi_nats,term1,term2,term3,total";

pub fn run_gaussian_sweep(cfg: &GaussianSweepConfig) -> AppResult<Vec<SweepRow>> {
    let r = cfg.r.unwrap_or_else(|| cfg.base.r());
    Ok(figure1_sweep(&cfg.base, &cfg.t2_grid, &cfg.n_grid, &cfg.m_grid, r)?)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line per row; infinite quantities are left blank.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.t2.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            cell(r.kl_nats),
            cell(r.orbit_mi_nats),
            cell(r.aug_mi_nats),
            cell(r.term1),
            cell(r.term2),
            cell(r.term3),
            cell(r.total),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

type Getter = fn(&SweepRow) -> Option<f64>;

const COLUMNS: [(&str, Getter); 4] = [
    ("KL term", |r| r.term1),
    ("orbit MI term", |r| r.term2),
    ("augmentation MI term", |r| r.term3),
    ("total", |r| r.total),
];

/// Top row: bound terms against t². Bottom row: against n, one line per m.
pub fn sweep_svg(rows: &[SweepRow]) -> String {
    let strength: Vec<&SweepRow> = rows.iter().filter(|r| r.panel == SweepPanel::Strength).collect();
    let multiplicity: Vec<&SweepRow> = rows.iter().filter(|r| r.panel == SweepPanel::Multiplicity).collect();
    let mut ms: Vec<usize> = multiplicity.iter().map(|r| r.m).collect();
    ms.dedup();
    let top = COLUMNS
        .iter()
        .map(|&(title, get)| Panel {
            title: title.into(),
            x_label: "t²".into(),
            series: vec![Series {
                name: title.into(),
                points: strength.iter().filter_map(|r| get(r).map(|v| (r.t2, v))).collect(),
            }],
        })
        .collect();
    let bottom = COLUMNS
        .iter()
        .map(|&(title, get)| Panel {
            title: title.into(),
            x_label: "n".into(),
            series: ms
                .iter()
                .map(|&m| Series {
                    name: format!("m = {m}"),
                    points: multiplicity.iter().filter(|r| r.m == m).filter_map(|r| get(r).map(|v| (r.n as f64, v))).collect(),
                })
                .collect(),
        })
        .collect();
    render(&[top, bottom])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape_and_blanks() {
        let mut cfg = GaussianSweepConfig::default();
        cfg.base.nu2 = 0.0;
        cfg.base.m = 1;
        cfg.t2_grid = vec![0.0, 1.0];
        cfg.n_grid = vec![1, 2];
        cfg.m_grid = vec![1, 3];
        let rows = run_gaussian_sweep(&cfg).unwrap();
        let csv = sweep_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 2 + 4);
        // m = 1, t² = 0, ν² = 0: orbit information is infinite.
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 10);
        assert_eq!(first[4], "");
        assert_eq!(first[9], "");
        assert!(sweep_svg(&rows).starts_with("<svg"));
    }
}
