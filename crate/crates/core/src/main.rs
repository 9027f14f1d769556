fn main() {
    std::process::exit(wax_core::cli::run_from(std::env::args_os()));
}
