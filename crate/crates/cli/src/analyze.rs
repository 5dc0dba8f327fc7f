// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use clap::Subcommand;

use dualq::analysis::{
    coupling_factor, predict_rate_ratio, reno_rate, scalable_rate, validity_limit, CouplingInputs, RatioInputs,
    DEFAULT_R_B_STAR,
};

#[derive(Subcommand, Debug)]
pub enum Analyze {
    /// Coupling factor k for a Classic decrease factor.
    Coupling {
        #[arg(long, default_value_t = 0.5)]
        beta_c: f64,
        #[arg(long, default_value_t = 0.015)]
        target: f64,
        #[arg(long, default_value_t = DEFAULT_R_B_STAR)]
        r_b_star: f64,
        /// Print `beta_c,target,r_b_star,k` as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Steady-state Reno and scalable packet rates for an RTT and probability.
    Rates {
        /// Seconds.
        #[arg(long)]
        rtt: f64,
        #[arg(long)]
        p: f64,
    },
    /// Predicted scalable:Classic rate ratio under the coupled AQM.
    Ratio {
        #[arg(long)]
        rtt_l: f64,
        #[arg(long)]
        rtt_c: f64,
        #[arg(long, default_value_t = 0.7)]
        beta_c: f64,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        #[arg(long, default_value_t = 0.015)]
        target: f64,
    },
}

pub fn run(what: Analyze) -> Result<()> {
    match what {
        Analyze::Coupling { beta_c, target, r_b_star, csv } => {
            let k = coupling_factor(CouplingInputs { beta_c, target, r_b_star });
            if csv {
                println!("beta_c,target,r_b_star,k");
                println!("{beta_c},{target},{r_b_star},{k}");
            } else {
                println!("{k:.2}");
            }
        }
        Analyze::Rates { rtt, p } => {
            println!("reno_pkts_per_s,{}", reno_rate(rtt, p)?);
            println!("scalable_pkts_per_s,{}", scalable_rate(rtt, p)?);
        }
        Analyze::Ratio { rtt_l, rtt_c, beta_c, k, target } => {
            let pred = predict_rate_ratio(RatioInputs { rtt_l, rtt_c, beta_c, k, target });
            println!("{:.4}", pred.ratio);
            if pred.outside_validity {
                eprintln!(
                    "warning: Classic RTT {rtt_c} s exceeds {:.4} s, where the averaged-RTT approximation holds",
                    validity_limit(target, beta_c)
                );
            }
        }
    }
    Ok(())
}
