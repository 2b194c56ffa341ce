fn main() {
    std::process::exit(magicrank_core::cli::run(std::env::args_os()));
}
