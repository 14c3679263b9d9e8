#![no_main]

use libfuzzer_sys::fuzz_target;
use uea_lab::PrimeContext;

fuzz_target!(|data: &[u8]| {
    let Some((&p, rest)) = data.split_first() else {
        return;
    };
    let Ok(ctx) = PrimeContext::new([3, 5, 7, 11][p as usize % 4]) else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(x) = ctx.parse(text) {
        assert!(ctx.is_local(&x));
        assert_eq!(ctx.parse(&x.to_string()).unwrap(), x);
    }
});
