//! Compiles the chapters under `book/src` so their listings run as doc-tests.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        pub mod $name {}
    };
}

chapter!(introduction, "introduction.md");
chapter!(hilbert, "hilbert.md");
chapter!(models, "models.md");
chapter!(classify, "classify.md");
chapter!(overlap, "overlap.md");
chapter!(valuation, "valuation.md");
chapter!(bound, "bound.md");
chapter!(replay, "replay.md");
chapter!(cli, "cli.md");
