fn main() {
    std::process::exit(bistable::cli::run(std::env::args_os()));
}
