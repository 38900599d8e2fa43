fn main() {
    std::process::exit(evoapsp::cli::main_with_args(std::env::args_os()));
}
