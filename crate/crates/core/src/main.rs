fn main() {
    std::process::exit(qpma::cli::main_with_args(std::env::args_os()));
}
