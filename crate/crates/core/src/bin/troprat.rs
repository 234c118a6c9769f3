fn main() {
    std::process::exit(troprat::cli::run(std::env::args_os()));
}
