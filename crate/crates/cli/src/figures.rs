//! Canned runs producing the data for each figure.
//!
//! Each figure is a list of panels; a panel is a subcommand and its config
//! text. Artifacts are named `<figure><panel>_<artifact>`.

use anyhow::{bail, Result};

pub struct Panel {
    pub name: String,
    pub subcommand: &'static str,
    pub config: String,
}

pub const FIGURES: &[&str] =
    &["fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"];

fn panel(name: impl Into<String>, subcommand: &'static str, config: String) -> Panel {
    Panel { name: name.into(), subcommand, config }
}

fn inner_outer(kind: &str, gamma: f64, outer: (f64, f64)) -> String {
    format!(
        "kind = \"{kind}\"\nsites = 801\nlayout = \"inner_outer\"\nhalf_width = 50\ngamma = {gamma:?}\n\
         theta1_inner_over_pi = 0.4\ntheta2_inner_over_pi = 0.1\n\
         theta1_outer_over_pi = {:?}\ntheta2_outer_over_pi = {:?}\n",
        outer.0, outer.1
    )
}

fn left_right(left: (f64, f64), right: (f64, f64), delta: f64) -> String {
    format!(
        "theta1_left_over_pi = {:?}\ntheta2_left_over_pi = {:?}\n\
         theta1_right_over_pi = {:?}\ntheta2_right_over_pi = {:?}\ndelta = {delta:?}\n",
        left.0, left.1, right.0, right.1
    )
}

const DNU1: (f64, f64) = (0.9, 0.2);
const DNU2: (f64, f64) = (-0.2, 0.3);
const LARGE_LEFT: (f64, f64) = (0.75, 0.05);
const SMALL_LEFT: (f64, f64) = (0.125, 0.1);

pub fn panels(id: &str) -> Result<Vec<Panel>> {
    let p = match id {
        "fig2" => [("a", (1.0 / 3.0, 0.2)), ("b", (-0.1, 0.125)), ("c", (0.1, 1.0 / 7.0)), ("d", (0.25, 0.25))]
            .into_iter()
            .map(|(n, (a, b))| {
                panel(n, "dispersion", format!("theta1_over_pi = {a:?}\ntheta2_over_pi = {b:?}\ngamma = 0.1\n"))
            })
            .collect(),
        "fig3a" => vec![panel("", "phase-diagram", "gamma = 0.0\ngrid = 101\n".into())],
        "fig3b" => vec![panel("", "phase-diagram", "gamma = 0.1\ngrid = 101\n".into())],
        "fig4" => {
            let mut v: Vec<Panel> = [("a", (0.7, 0.05)), ("b", DNU1), ("c", DNU2)]
                .into_iter()
                .map(|(n, o)| panel(n, "spectrum", inner_outer("three_step", 0.1, o)))
                .collect();
            v.push(panel("d", "spectrum", inner_outer("three_step", 0.1, (-0.6, 0.2)) + "eigenvectors = \"edge_min_re\"\n"));
            v.push(panel("e", "spectrum", inner_outer("three_step", 0.0, (-0.6, 0.2))));
            v
        }
        "fig5" => vec![panel(
            "",
            "edge-map",
            "theta1_inner_over_pi = 0.4\ntheta2_inner_over_pi = 0.1\ngamma = 0.1\nhalf_width = 50\nsites = 301\n\
             grid = 41\n"
                .into(),
        )],
        "fig6" => vec![panel(
            "",
            "delta-sweep",
            inner_outer("three_step_symmetric", 0.1, (-0.6, 0.2)).replace("sites = 801", "sites = 401")
                + "delta_min = 0.0\ndelta_max = 0.2\ndelta_count = 21\n",
        )],
        "fig7" => {
            let mut v = Vec::new();
            for (row, outer) in [("1", DNU1), ("2", DNU2)] {
                for (col, gamma, delta) in [("a", 0.0, 0.05), ("b", 0.1, 0.05), ("c", 0.1, 0.0696), ("d", 0.1, 0.08)] {
                    let cfg = inner_outer("three_step_perturbed_symmetric", gamma, outer) + &format!("delta = {delta:?}\n");
                    v.push(panel(format!("{col}{row}"), "spectrum", cfg));
                }
            }
            v
        }
        "fig8" => {
            let mut v = Vec::new();
            for (row, gamma) in [("1", 0.0), ("2", 0.1)] {
                for (col, outer, theta_r) in [("a", DNU1, 0.1), ("b", DNU2, 0.001), ("c", DNU2, 0.1)] {
                    let cfg = inner_outer("three_step_perturbed", gamma, outer)
                        + &format!("delta = 0.05\ntheta_r = {theta_r:?}\nseeds = 32\ndump_spectrum = true\n");
                    v.push(panel(format!("{col}{row}"), "disorder", cfg));
                }
            }
            v
        }
        "fig9" => [("a", DNU2), ("b", (-0.6, 0.15))]
            .into_iter()
            .map(|(n, o)| panel(n, "evolve", inner_outer("three_step", 0.1, o) + "steps = 246\nsnapshots = [246]\n"))
            .collect(),
        "fig10" => [("a", 0.0), ("b", 0.02), ("c", 0.05)]
            .into_iter()
            .map(|(n, d)| panel(n, "infer-edges", left_right(LARGE_LEFT, (-1.0 / 3.0, 0.0), d)))
            .collect(),
        "fig11" => [("a", (-0.1, 0.4)), ("b", (-1.0 / 15.0, 2.0 / 3.0))]
            .into_iter()
            .map(|(n, r)| panel(n, "infer-edges", left_right(LARGE_LEFT, r, 0.05)))
            .collect(),
        "fig12" => [("a", (-0.2, -1.0 / 12.0)), ("b", (-0.1, 0.4)), ("c", (-0.05, -1.0 / 7.0))]
            .into_iter()
            .map(|(n, r)| panel(n, "infer-edges", left_right(SMALL_LEFT, r, 0.05)))
            .collect(),
        "fig13" => vec![panel(
            "",
            "spectrum",
            format!(
                "kind = \"three_step_perturbed\"\nsites = 601\nlayout = \"left_right\"\n{}eigenvectors = \"localized\"\n",
                left_right(SMALL_LEFT, (-0.2, -1.0 / 12.0), 0.05)
            ),
        )],
        other => bail!(ptwalk_core::Error::Config(format!("unknown figure {other:?}; known: {}", FIGURES.join(", ")))),
    };
    Ok(p)
}
