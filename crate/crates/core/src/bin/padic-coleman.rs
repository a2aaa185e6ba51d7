fn main() {
    std::process::exit(padic_coleman::cli::main_with_args(std::env::args_os()));
}
