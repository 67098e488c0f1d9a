fn main() {
    std::process::exit(slpr_core::cli::run(std::env::args_os()));
}
