#![no_main]

use kasteleyn::format::parse_rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(q) = parse_rational(s) {
        assert_eq!(parse_rational(&q.to_string()), Ok(q));
    }
});
