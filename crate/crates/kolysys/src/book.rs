//! The guide chapters, compiled as doc-tests so every Rust snippet in the
//! book builds and runs against the current API.

#[cfg(doctest)]
macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub struct $name;
    };
}

#[cfg(doctest)]
mod chapters {
    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(
        ResiduesAndLinearAlgebra,
        "../../../book/src/residues-and-linear-algebra.md"
    );
    chapter!(GradedAlgebra, "../../../book/src/graded-algebra.md");
    chapter!(ExteriorCalculus, "../../../book/src/exterior-calculus.md");
    chapter!(SevenTuples, "../../../book/src/seven-tuples.md");
    chapter!(KolyvaginSystems, "../../../book/src/kolyvagin-systems.md");
    chapter!(UnitSystems, "../../../book/src/unit-systems.md");
    chapter!(Cyclotomic, "../../../book/src/cyclotomic.md");
    chapter!(Cli, "../../../book/src/cli.md");
    chapter!(FileFormats, "../../../book/src/file-formats.md");
}
