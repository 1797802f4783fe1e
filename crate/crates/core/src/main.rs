fn main() {
    std::process::exit(potential_ns::cli::run(std::env::args_os()));
}
