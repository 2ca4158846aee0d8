//! Regenerates the JSON signature documents in `signatures/`.
//!
//! Usage: `cargo run -p bindsig --example write_docs [out_dir]`

use bindsig::bundles;
use bindsig::json::{document_to_json, to_canonical_string, SignatureDocument};
use bindsig::rewrite::Regime;
use bindsig::signature::{AlgebraicSignature, TwoSignature};

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "signatures".to_string());
    std::fs::create_dir_all(&out_dir).expect("create output directory");

    let empty = bundles::ExampleBundle {
        name: "empty".into(),
        two: TwoSignature::new(AlgebraicSignature::empty(), vec![]).unwrap(),
        regime: Regime::Terminating,
        fuel: 1000,
    };
    let mut docs: Vec<(String, SignatureDocument)> = Vec::new();
    for bundle in [
        bundles::monoid(),
        bundles::lc_beta_eta(),
        bundles::fixpoint(),
        bundles::lc_fix(),
        bundles::commutative(),
        bundles::idempotent(),
        empty,
    ] {
        docs.push((
            bundle.name.clone(),
            SignatureDocument {
                two: bundle.two,
                regime: bundle.regime,
                fuel: bundle.fuel,
            },
        ));
    }
    for (name, doc) in &docs {
        let text = to_canonical_string(&document_to_json(doc));
        let path = format!("{out_dir}/{name}.json");
        std::fs::write(&path, &text).expect("write document");
        println!("wrote {path}");
        // the λ-calculus bundle is also known by its equation set
        if name == "lc" {
            let alias = format!("{out_dir}/lcbe.json");
            std::fs::write(&alias, &text).expect("write document");
            println!("wrote {alias}");
        }
    }
}
