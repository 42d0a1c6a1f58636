fn main() {
    std::process::exit(bmsdp::cli::run(std::env::args_os()));
}
