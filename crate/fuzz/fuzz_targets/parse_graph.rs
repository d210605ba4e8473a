#![no_main]

use kasteleyn::format::{parse, serialize};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok((g, c)) = parse(text) else { return };
    // Canonical text must survive a second pass unchanged.
    let canonical = serialize(&g, &c);
    let (g2, c2) = parse(&canonical).expect("serialized output parses");
    assert_eq!((&g2, &c2), (&g, &c));
    assert_eq!(serialize(&g2, &c2), canonical);
});
