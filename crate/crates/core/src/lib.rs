/*!
Exact multiple-pattern matching with a strided bit-parallel q-gram filter.

The search runs in two phases. The filter cuts the text into non-overlapping
q-grams, maps each q-gram to an integer super-character and runs a packed
Shift-Or automaton over the superimposition of all patterns, reading only
every k-th super-character. Every hit is then verified against the original
patterns by direct byte comparison, so the filter may produce false positives
but never loses an occurrence.

```
use mag::{Matcher, PatternSet, SearchConfig};

let ps = PatternSet::new(["abba", "bbac"]).unwrap();
let matcher = Matcher::new(&ps, &SearchConfig::default()).unwrap();
let found: Vec<(usize, usize)> = matcher
    .find_all(b"xabbacy")
    .into_iter()
    .map(|o| (o.pattern, o.offset))
    .collect();
assert_eq!(found, [(0, 1), (1, 2)]);
```
*/

pub mod alphabet;
pub mod engine;
pub mod error;
pub mod filter;
pub mod oracle;
pub mod pattern;
pub mod qgram;
pub mod superimpose;
pub mod tuner;
pub mod verify;

pub use alphabet::{AlphabetMap, Histogram, MapStrategy, QGramMap};
pub use engine::{MappingChoice, Matcher, Params, SearchConfig, SearchStats, Variant};
pub use error::{Error, Result};
pub use filter::{Candidate, FilterMachine};
pub use oracle::{ac_search, naive_search, AhoCorasick};
pub use pattern::{Occurrence, PatternSet};
pub use qgram::{EncodedText, GramConfig};
pub use superimpose::SuperPattern;
pub use tuner::{TuningInput, TuningResult};
pub use verify::{dedup_merge, VerifyWindow};
