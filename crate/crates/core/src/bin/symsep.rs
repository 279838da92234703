fn main() {
    std::process::exit(symsep::cli::run(std::env::args_os()));
}
