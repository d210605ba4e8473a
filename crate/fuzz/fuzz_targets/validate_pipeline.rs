#![no_main]

use kasteleyn::format::parse;
use kasteleyn::graph::validate;
use kasteleyn::immersion::{is_disc_embedding, is_embedding, is_generic, is_immersion};
use libfuzzer_sys::fuzz_target;

/// Geometric predicates are quadratic in the edge count.
const MAX_EDGES: usize = 64;

fuzz_target!(|text: &str| {
    let Ok((g, c)) = parse(text) else { return };
    let valid = g.natural_mode().is_some_and(|mode| validate(&g, mode).is_valid());
    if g.edge_count() > MAX_EDGES {
        return;
    }
    let generic = is_generic(&g, &c);
    let immersed = is_immersion(&g, &c);
    let embedded = is_embedding(&g, &c);
    let disc = is_disc_embedding(&g, &c);
    // Parallel edges and loops are outside the predicates' domain.
    if valid {
        assert!(!disc || embedded);
        assert!(!embedded || immersed);
        assert!(!immersed || generic);
    }
});
