fn main() {
    std::process::exit(supnorm::cli::main_with_args(std::env::args_os()));
}
