fn main() {
    std::process::exit(egqft::cli::run(std::env::args_os()));
}
