fn main() {
    std::process::exit(impulse_cd::cli::main_with_args(std::env::args_os()));
}
