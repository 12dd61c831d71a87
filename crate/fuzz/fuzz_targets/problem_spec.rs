#![no_main]

use libfuzzer_sys::fuzz_target;
use tesgo::cli::RunRequest;
use tesgo::problems::ProblemId;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = text.parse::<ProblemId>();
    let specs: Vec<String> = text.split(',').map(str::to_string).collect();
    if let Ok(parsed) = RunRequest::parse_problems(&specs, None) {
        for (id, n) in parsed {
            assert!(id.supports(n));
        }
    }
});
