//! Acceptance run: one block per criterion, each check on its own line and
//! a closing `CRITERION` line with the verdict and the runtime.
//!
//! Exits non-zero if any check fails except those listed in
//! `KNOWN_FAILURES`, which are reported as FAIL but do not abort the run.

use std::process::ExitCode;
use std::time::Instant;

use spherical_means::checks::{
    bessel_suite, ek_suite, epd_suite, fpr_roundtrip, identity_deviation, radial_branches,
    radial_crosscheck_suite, radial_half_data_suite, radial_phantom, rl_suite, shell_consistency,
    shifted_phantom, Bound, Check, Resolution,
};
use spherical_means::grid::VolumeGrid;
use spherical_means::Result;

/// The Riemann-Liouville constant as stated, `(-1)^k k!`, does not hold
/// for `k >= 1`; the exact value `(-1)^k (2k)!` is checked alongside.
const KNOWN_FAILURES: &[&str] = &["rl_constant_stated_k1", "rl_constant_stated_k2"];

struct Tally {
    unexpected: Vec<String>,
    known: Vec<String>,
}

impl Tally {
    fn criterion<F>(&mut self, id: &str, title: &str, budget_s: f64, run: F)
    where
        F: FnOnce() -> Result<Vec<Check>>,
    {
        println!("== criterion {id}: {title}");
        let start = Instant::now();
        let mut checks = match run() {
            Ok(c) => c,
            Err(e) => {
                println!("ERROR {e}");
                self.unexpected.push(format!("criterion {id}: {e}"));
                println!("CRITERION {id} FAIL");
                return;
            }
        };
        let secs = start.elapsed().as_secs_f64();
        checks.push(Check::at_most(format!("runtime_seconds_{id}"), secs, budget_s));
        let mut pass = true;
        for c in &checks {
            println!("{c}");
            if !c.passed() {
                pass = false;
                if KNOWN_FAILURES.contains(&c.name.as_str()) {
                    self.known.push(c.name.clone());
                } else {
                    self.unexpected.push(c.name.clone());
                }
            }
        }
        println!(
            "CRITERION {id} {} ({secs:.1} s)",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters: nothing to enumerate
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut t = Tally {
        unexpected: Vec::new(),
        known: Vec::new(),
    };

    t.criterion("1", "fractional-operator suite", 5.0, || {
        let mut v = ek_suite()?;
        v.extend(rl_suite()?);
        Ok(v)
    });

    t.criterion("2", "special functions", 1.0, bessel_suite);

    t.criterion("3", "intermediate identity P[t phi] = I^2 f / 2", 300.0, || {
        let coarse = identity_deviation(Resolution::COARSE)?;
        let reference = identity_deviation(Resolution::REFERENCE)?;
        Ok(vec![
            Check::at_most("identity_rel_max_reference", reference.rel_max, 0.02),
            Check::at_most("identity_rel_max_coarse", coarse.rel_max, 0.02),
            Check::new(
                "identity_refinement_ratio",
                coarse.rel_max / reference.rel_max,
                Bound::AtLeast(1.0),
            ),
        ])
    });

    let mut radial_rec: Option<VolumeGrid> = None;
    let mut reference_l2: Vec<f64> = Vec::new();
    t.criterion("4a", "FPR roundtrip at reference resolution", 600.0, || {
        let (rec, radial) = fpr_roundtrip(&radial_phantom(), Resolution::REFERENCE)?;
        let (_, shifted) = fpr_roundtrip(&shifted_phantom(), Resolution::REFERENCE)?;
        radial_rec = Some(rec);
        reference_l2 = vec![radial.rel_l2, shifted.rel_l2];
        Ok(vec![
            Check::at_most("fpr_rel_l2_radial_reference", radial.rel_l2, 0.05),
            Check::at_most("fpr_rel_l2_shifted_reference", shifted.rel_l2, 0.05),
        ])
    });

    t.criterion("4b", "FPR roundtrip with all resolutions doubled", 5400.0, || {
        let mut v = Vec::new();
        let phantoms = [("radial", radial_phantom()), ("shifted", shifted_phantom())];
        for (k, (name, f)) in phantoms.iter().enumerate() {
            let reference = match reference_l2.get(k) {
                Some(&e) => e,
                None => fpr_roundtrip(f, Resolution::REFERENCE)?.1.rel_l2,
            };
            let (_, doubled) = fpr_roundtrip(f, Resolution::DOUBLED)?;
            v.push(Check::at_most(format!("fpr_rel_l2_{name}_doubled"), doubled.rel_l2, 0.05));
            v.push(Check::new(
                format!("fpr_refinement_factor_{name}"),
                reference / doubled.rel_l2,
                Bound::AtLeast(1.5),
            ));
        }
        Ok(v)
    });

    t.criterion("5", "radial half-data inversion", 1.0, radial_half_data_suite);

    t.criterion("6", "EPD forward and inverse problems", 900.0, epd_suite);

    t.criterion("7", "cross-discretization consistency", 300.0, || {
        let mut v = radial_crosscheck_suite()?;
        let (inner, _) = radial_branches()?;
        let rec = match radial_rec.take() {
            Some(r) => r,
            None => fpr_roundtrip(&radial_phantom(), Resolution::REFERENCE)?.0,
        };
        // three times the error budget of the 1-D inversion
        v.push(Check::at_most("fpr_shell_average_vs_1d", shell_consistency(&rec, &inner), 3e-3));
        Ok(v)
    });

    println!();
    if !t.known.is_empty() {
        println!("known failures (documented): {}", t.known.join(", "));
    }
    if t.unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures: {}", t.unexpected.join(", "));
        ExitCode::FAILURE
    }
}
