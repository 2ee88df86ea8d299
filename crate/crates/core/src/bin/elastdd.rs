fn main() {
    std::process::exit(elastdd::cli::main_with_args(std::env::args_os()));
}
