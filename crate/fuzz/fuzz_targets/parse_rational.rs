#![no_main]

use libfuzzer_sys::fuzz_target;
use skewrot::squares::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = text.parse::<Rational>() {
        // canonical text must parse back to the same value
        let back: Rational = q.to_string().parse().expect("display output parses");
        assert_eq!(back, q);
    }
});
