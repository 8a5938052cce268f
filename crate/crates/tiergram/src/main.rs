fn main() {
    std::process::exit(tiergram::cli::run(std::env::args_os()));
}
